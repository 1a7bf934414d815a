#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

namespace afire {

/// Thrown when a matrix that the algorithm must invert is numerically
/// singular; the message names the matrix.
struct SingularMatrixError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Tabulated curve as read from disk, energies strictly increasing (keV).
struct RawCurve {
    std::vector<double> energies;
    std::vector<double> values;
};

enum class CurveKind { Spectrum, Mac };

/// Parses a whitespace-separated two-column (energy_keV, value) ASCII file.
/// Lines starting with '#' are comments. Spectrum values are clamped at 0.
RawCurve load_curve(const std::string& path, CurveKind kind);
RawCurve parse_curve(std::istream& in, CurveKind kind, const std::string& name);

/// Q spectra and D mass-attenuation curves resampled onto one uniform
/// energy grid of M bin centers.
struct SpectralSystem {
    std::vector<double> energies;               // bin centers, keV
    double delta_e = 0.0;                       // bin width, keV
    std::vector<std::vector<double>> spectra;   // Q rows of M weights, each summing to 1
    std::vector<double> spectrum_sums;          // cached float sums of each row
    std::vector<std::vector<double>> macs;      // D rows of M values, cm^2/g

    std::size_t n_spectra() const { return spectra.size(); }
    std::size_t n_materials() const { return macs.size(); }
    std::size_t n_bins() const { return energies.size(); }
};

/// Resamples the given curves onto bins of width delta_e centered inside
/// [e_min, e_max]. Spectra interpolate linearly and are normalized to sum
/// 1; MAC curves interpolate log-log (attenuation tables are near
/// power-law between samples).
SpectralSystem build_system(const std::vector<RawCurve>& spectra, const std::vector<RawCurve>& macs,
                            double e_min, double e_max, double delta_e);

/// The constant matrix driving the update: phi[q][d] = b_d^T w_hat^[q],
/// with w_hat the spectral weights at the constant line integrals C.
struct PhiMatrix {
    Eigen::MatrixXd phi;      // Q x D
    Eigen::MatrixXd inverse;  // D x Q when Q == D, else empty
    double kappa_f = 0.0;     // ||phi||_F / sigma_min(phi)
};

/// C has one row per spectrum, one column per material; an empty matrix
/// means C = 0.
PhiMatrix compute_phi(const SpectralSystem& system, const Eigen::MatrixXd& constants = {});

/// Unit-simplex weights w_m = s_m exp(z_m) / sum(s exp(z)) with
/// z_m = -sum_d b_dm a_d, evaluated with a max-shift so finite inputs
/// never overflow.
std::vector<double> spectral_weights(const SpectralSystem& system, std::size_t q,
                                     std::span<const double> line_integrals);

} // namespace afire
