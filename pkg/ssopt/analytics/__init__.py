from .numerics import adaptive_simpson, integrate_pieces, bisect, bisect_array, expand_bracket, golden_section
from .context import AnalyticsContext, QuadratureConfig, RootFindConfig
from .kernel import G0Kernel, PiecewiseLinearKernel, QuadraticKernel, QuadratureKernel, create_kernel
from .core import Analytics, MatchedLevels
from .value import RelativeValue, VStar, CertificateConfig, CertificateReport, CheckResult, vstar_certificate, \
    find_s_lower
