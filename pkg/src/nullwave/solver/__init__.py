"""Transport solves, the Picard scheme, estimate checks and experiments."""

from .estimates import (EstimateCheck, estimate_sweep, indicator_bilinear_example,
                        verify_bilinear, verify_lemma1, verify_norm_equivalence)
from .experiments import (BlowUpReport, StabilityReport, blowup_probe, glue_solve,
                          horizon_grid, riccati_oracle, stability_experiment)
from .picard import IterationRecord, PicardReport, picard_solve, quadratic_source
from .transport import transport_solve

__all__ = [
    "BlowUpReport", "EstimateCheck", "IterationRecord", "PicardReport", "StabilityReport",
    "blowup_probe", "estimate_sweep", "glue_solve", "horizon_grid", "indicator_bilinear_example",
    "picard_solve", "quadratic_source", "riccati_oracle", "stability_experiment",
    "transport_solve", "verify_bilinear", "verify_lemma1", "verify_norm_equivalence",
]
