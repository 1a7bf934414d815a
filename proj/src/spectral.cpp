#include "afire/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace afire {

namespace {

double interp_linear(const RawCurve& c, double e) {
    const auto it = std::upper_bound(c.energies.begin(), c.energies.end(), e);
    if (it == c.energies.begin() || it == c.energies.end()) {
        if (e == c.energies.front()) return c.values.front();
        if (e == c.energies.back()) return c.values.back();
        throw std::invalid_argument("build_system: curve does not cover energy " + std::to_string(e) + " keV");
    }
    const std::size_t i1 = static_cast<std::size_t>(it - c.energies.begin());
    const std::size_t i0 = i1 - 1;
    const double t = (e - c.energies[i0]) / (c.energies[i1] - c.energies[i0]);
    return (1.0 - t) * c.values[i0] + t * c.values[i1];
}

double interp_loglog(const RawCurve& c, double e) {
    const auto it = std::upper_bound(c.energies.begin(), c.energies.end(), e);
    if (it == c.energies.begin() || it == c.energies.end()) {
        if (e == c.energies.front()) return c.values.front();
        if (e == c.energies.back()) return c.values.back();
        throw std::invalid_argument("build_system: curve does not cover energy " + std::to_string(e) + " keV");
    }
    const std::size_t i1 = static_cast<std::size_t>(it - c.energies.begin());
    const std::size_t i0 = i1 - 1;
    const double t = (std::log(e) - std::log(c.energies[i0])) /
                     (std::log(c.energies[i1]) - std::log(c.energies[i0]));
    return std::exp((1.0 - t) * std::log(c.values[i0]) + t * std::log(c.values[i1]));
}

} // namespace

RawCurve parse_curve(std::istream& in, CurveKind kind, const std::string& name) {
    RawCurve curve;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        double e, v;
        if (!(ss >> e)) continue;  // blank or comment-only line
        if (!(ss >> v)) throw std::invalid_argument(name + ":" + std::to_string(lineno) + ": malformed line");
        std::string extra;
        if (ss >> extra) throw std::invalid_argument(name + ":" + std::to_string(lineno) + ": trailing tokens");
        if (!curve.energies.empty() && e <= curve.energies.back())
            throw std::invalid_argument(name + ":" + std::to_string(lineno) + ": energies must be strictly increasing");
        if (kind == CurveKind::Spectrum) v = std::max(v, 0.0);
        curve.energies.push_back(e);
        curve.values.push_back(v);
    }
    if (curve.energies.empty()) throw std::invalid_argument(name + ": empty curve file");
    return curve;
}

RawCurve load_curve(const std::string& path, CurveKind kind) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("load_curve: cannot open " + path);
    return parse_curve(in, kind, path);
}

SpectralSystem build_system(const std::vector<RawCurve>& spectra, const std::vector<RawCurve>& macs,
                            double e_min, double e_max, double delta_e) {
    if (!(delta_e > 0.0)) throw std::invalid_argument("build_system: delta_e must be > 0");
    if (!(e_max > e_min)) throw std::invalid_argument("build_system: empty energy range");
    const auto m = static_cast<std::size_t>(std::llround((e_max - e_min) / delta_e));
    if (m < 1) throw std::invalid_argument("build_system: energy range shorter than one bin");

    SpectralSystem sys;
    sys.delta_e = delta_e;
    sys.energies.resize(m);
    for (std::size_t i = 0; i < m; ++i) sys.energies[i] = e_min + (i + 0.5) * delta_e;

    for (const auto& sp : spectra) {
        std::vector<double> w(m);
        double total = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            w[i] = std::max(interp_linear(sp, sys.energies[i]), 0.0);
            total += w[i];
        }
        if (!(total > 0.0)) throw std::invalid_argument("build_system: spectrum vanishes on the bin range");
        for (auto& v : w) v /= total;
        double sum = 0.0;
        for (double v : w) sum += v;
        sys.spectra.push_back(std::move(w));
        sys.spectrum_sums.push_back(sum);
    }

    for (const auto& mac : macs) {
        std::vector<double> b(m);
        for (std::size_t i = 0; i < m; ++i) {
            b[i] = interp_loglog(mac, sys.energies[i]);
            if (!(b[i] > 0.0) || !std::isfinite(b[i]))
                throw std::invalid_argument("build_system: MAC values must be positive and finite");
        }
        sys.macs.push_back(std::move(b));
    }
    return sys;
}

std::vector<double> spectral_weights(const SpectralSystem& system, std::size_t q,
                                     std::span<const double> line_integrals) {
    const std::size_t m = system.n_bins();
    const std::size_t d_count = system.n_materials();
    if (q >= system.n_spectra()) throw std::invalid_argument("spectral_weights: spectrum index out of range");
    if (line_integrals.size() != d_count)
        throw std::invalid_argument("spectral_weights: expected one line integral per material");
    for (double a : line_integrals)
        if (!std::isfinite(a)) throw std::invalid_argument("spectral_weights: line integrals must be finite");

    std::vector<double> w(m);
    double z_max = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
        double z = 0.0;
        for (std::size_t d = 0; d < d_count; ++d) z -= system.macs[d][i] * line_integrals[d];
        w[i] = z;
        z_max = std::max(z_max, z);
    }
    double denom = 0.0;
    const auto& s = system.spectra[q];
    for (std::size_t i = 0; i < m; ++i) {
        w[i] = s[i] * std::exp(w[i] - z_max);
        denom += w[i];
    }
    for (auto& v : w) v /= denom;
    return w;
}

PhiMatrix compute_phi(const SpectralSystem& system, const Eigen::MatrixXd& constants) {
    const auto q_count = static_cast<Eigen::Index>(system.n_spectra());
    const auto d_count = static_cast<Eigen::Index>(system.n_materials());
    Eigen::MatrixXd c = constants;
    if (c.size() == 0) c = Eigen::MatrixXd::Zero(q_count, d_count);
    if (c.rows() != q_count || c.cols() != d_count)
        throw std::invalid_argument("compute_phi: constants must be Q x D");

    PhiMatrix out;
    out.phi.resize(q_count, d_count);
    std::vector<double> a(static_cast<std::size_t>(d_count));
    for (Eigen::Index q = 0; q < q_count; ++q) {
        for (Eigen::Index d = 0; d < d_count; ++d) a[static_cast<std::size_t>(d)] = c(q, d);
        const auto w = spectral_weights(system, static_cast<std::size_t>(q), a);
        for (Eigen::Index d = 0; d < d_count; ++d) {
            double acc = 0.0;
            const auto& b = system.macs[static_cast<std::size_t>(d)];
            for (std::size_t m = 0; m < w.size(); ++m) acc += b[m] * w[m];
            out.phi(q, d) = acc;
        }
    }

    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(out.phi);
    const double sigma_min = svd.singularValues().tail(1)(0);
    const double fro = out.phi.norm();
    if (!(sigma_min > 1e-12 * fro))
        throw SingularMatrixError("compute_phi: the constant matrix phi is numerically singular");
    out.kappa_f = fro / sigma_min;
    if (q_count == d_count) out.inverse = out.phi.inverse();
    return out;
}

} // namespace afire
