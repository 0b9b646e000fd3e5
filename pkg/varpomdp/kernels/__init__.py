from .rng import RngStream, RngLike, as_generator, as_stream
from .gaussian import LOG_2PI, cholesky, logpdf_from_residuals, mvn_logpdf, mvn_sample
from .conjugate import (
    MNIWPrior,
    mniw_posterior,
    mniw_sample,
    mniw_logpdf,
    dirichlet_sample,
)
