from asymptotics.ah import AhReport, verify_ah
from asymptotics.decay import DecayFit, estimate_decay_rate, fit_power_law

__all__ = ["AhReport", "DecayFit", "estimate_decay_rate", "fit_power_law", "verify_ah"]
