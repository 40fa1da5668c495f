from .fading_relay import (
    curve_epscap_vs_snr,
    curve_error_vs_rate,
    cutset_fading,
    i_cf_fading,
    i_cf_prime,
    i_df_fading,
    nhat_opt,
    optimize_beta,
    rayleigh_model,
)

__all__ = [
    "curve_epscap_vs_snr", "curve_error_vs_rate", "cutset_fading", "i_cf_fading",
    "i_cf_prime", "i_df_fading", "nhat_opt", "optimize_beta", "rayleigh_model",
]
