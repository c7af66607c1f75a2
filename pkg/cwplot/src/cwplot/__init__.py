"""Post-processing plots for cwsim run outputs."""

from .plots import SchemaError, plot_coherence, plot_registration

__version__ = "0.1.0"
