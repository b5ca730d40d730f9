#!/usr/bin/env python
# -*- coding: utf-8 -*-
# @File    : run_ssopt.py
import sys

from ssopt.cli import main

if __name__ == '__main__':
    sys.exit(main())
