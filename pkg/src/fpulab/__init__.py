"""Desk-scale laboratory for beta-FPU chains in thermal equilibrium.

Simulation side: periodic chain states, an order-6 symplectic integrator,
thermal and zig-zag initial conditions. Analysis side: Gibbs thermodynamics
of the bond distribution, renormalized-wave spectra, the four-wave resonance
manifold, kinetic linewidth predictions, discrete-breather tracking, and
Lyapunov diagnostics. The cli module exposes the same capabilities as the
`fpulab` command.
"""

__version__ = "0.1.0"

from .chain import (ChainState, ModelParams, SiteEnergy, bond_differences,
                    forces, localization, pi_mode_energy, pi_mode_init,
                    random_thermal_init, site_energies, total_energy)
from .integrators import (YOSHIDA6, BlowUpError, CompositionScheme, integrate,
                          integrate_raw, step)
from .thermo import (ThermoSolution, bond_moments, effective_nonlinearity,
                     eta_exact, eta_selfconsistent, solve_temperature,
                     thermo_solution)
from .spectral import (FourierField, ModeStatistics, SpectralDensity,
                       WaveField, autocorrelation, bare_from_renormalized,
                       from_fourier, from_waves, linear_dispersion,
                       measure_eta, measure_eta_fixed_point, mode_spectrum,
                       mode_statistics, spatiotemporal_spectrum,
                       spectrum_from_correlation, to_fourier, to_waves,
                       wave_series)
from .resonance import (PeriodicDelta, ResonanceQuartet, ScanReport, delta22,
                        delta31, delta40, exact_quartets, momentum_partner,
                        nontrivial_branches, quartet_time_average,
                        resonance_mask, verify_no_3to1, verify_no_4to0)
from .linewidth import (CorrelationPrediction, ModeSpectrum, correlation_time,
                        decay_time, default_time_grid, predict_correlation,
                        predict_spectrum, predict_width, spectral_width)
from .breathers import (BreatherTrack, FilteredField, PiModeResult,
                        default_omega_cut, detect_breathers, frequency_filter,
                        pi_mode_experiment)
from .lyapunov import (LyapunovEstimate, TangentState, lyapunov_fpu,
                       lyapunov_map, seed_tangent, tangent_step)
from .runio import (RunLock, RunManifest, load_manifest, load_run,
                    manifest_from_json, read_series, save_manifest,
                    write_series)
