#!/usr/bin/env python
# -*- coding: utf-8 -*-
# @File    : params.py
import math

# quadrature / root finding
quad_tol = 1e-10
root_tol = 1e-10
simpson_max_depth = 50
simpson_min_depth = 3
bracket_factor = 2.0
bracket_cap = 2.0 ** 60
root_max_iter = 200
max_tol = 1e-4

# sampled checks of (H2)/(H4)/(H5)
h_grid_scale = 10.0
h_grid_points = 401

# certificate
cert_grid_points = 4096
cert_tol = 1e-7
cert_pairs = 10000
cert_span_factor = 10.0
cert_seed = 0
cert_structured_points = 256
cert_structured_xis = 64

# grid search
grid_log_points = 512
grid_uniform_points = 512
golden_tol = 1e-10
grid_xi0 = 1.0
grid_span_factor = 8.0

# simulator
burn_in = 0.1
block_size = 2 ** 18
sim_tol = 0.02

# residual targets, |resid| <= residual_tol * (1 + |value|)
residual_tol = 1e-8

invphi = (math.sqrt(5) - 1) / 2  # 1 / phi
invphi2 = (3 - math.sqrt(5)) / 2  # 1 / phi^2
