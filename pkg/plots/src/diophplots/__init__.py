"""Static report figures for diophlab experiment outputs."""

from .figures import (FigureInfo, SchemaError, origin_slope, plot_clt_hist,
                      plot_lk, plot_qq, plot_xi_decay, read_table)

__version__ = "0.1.0"
