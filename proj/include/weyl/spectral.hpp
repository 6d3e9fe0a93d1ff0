#pragma once

// Galerkin discretizations of -Laplace + V on the flat 3-torus (plane waves)
// and the Dirichlet cube (sine basis): assembly, dense eigensolve, counting
// function, pointwise spectral density and resolvent-power diagonals, plus a
// binary cache keyed by a content hash of (discretization, potential).

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "weyl/errors.hpp"
#include "weyl/geometry.hpp"
#include "weyl/parallel.hpp"
#include "weyl/potential.hpp"

namespace weyl {

struct TorusSpec {
    double L = 1.0;
    double lambda_basis = 400.0; // include plane waves with |2 pi m / L|^2 <= lambda_basis

    void validate() const {
        if (!(L > 0.0)) throw domain_error("TorusSpec: L > 0");
        if (!(lambda_basis > 0.0)) throw domain_error("TorusSpec: lambda_basis > 0");
    }
};

struct CubeSpec {
    double a = 1.0;
    int m_max = 8; // sine modes 1 <= m_i <= m_max per axis

    void validate() const {
        if (!(a > 0.0)) throw domain_error("CubeSpec: a > 0");
        if (m_max < 1) throw domain_error("CubeSpec: m_max >= 1");
    }
};

enum class GeometryKind : std::uint32_t { torus = 0, cube = 1 };

struct HermitianOperator {
    GeometryKind kind = GeometryKind::torus;
    double box = 1.0;          // L or a
    double lambda_basis = 0.0; // spectral basis cutoff
    std::vector<std::array<int, 3>> basis;
    bool is_real = false;
    Eigen::MatrixXd Hr;  // used when is_real
    Eigen::MatrixXcd Hc; // used otherwise

    std::size_t size() const { return basis.size(); }

    void check_hermitian() const {
        const std::size_t n = size();
        double scale = 1e-300;
        if (is_real) {
            for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(Hr(i, i)));
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = i + 1; j < n; ++j)
                    if (std::abs(Hr(i, j) - Hr(j, i)) > 1e-12 * scale)
                        throw numeric_error("HermitianOperator: symmetry violated");
        } else {
            for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(Hc(i, i).real()));
            for (std::size_t i = 0; i < n; ++i) {
                if (std::abs(Hc(i, i).imag()) > 1e-12 * scale)
                    throw numeric_error("HermitianOperator: diagonal not real");
                for (std::size_t j = i + 1; j < n; ++j)
                    if (std::abs(Hc(i, j) - std::conj(Hc(j, i))) > 1e-12 * scale)
                        throw numeric_error("HermitianOperator: conjugate symmetry violated");
            }
        }
    }
};

namespace detail {

inline void enforce_memory_budget(std::size_t n, bool complex_valued) {
    double budget = 6.0e9;
    if (const char* env = std::getenv("WEYL_MEM_BUDGET")) {
        const double b = std::atof(env);
        if (b > 0) budget = b;
    }
    // matrix + eigenvector matrix + solver workspace
    const double bytes = 3.2 * static_cast<double>(n) * n * (complex_valued ? 16.0 : 8.0);
    if (bytes > budget)
        throw resource_error("basis of size " + std::to_string(n) + " requires ~" +
                             std::to_string(static_cast<std::uint64_t>(bytes)) + " bytes, over budget " +
                             std::to_string(static_cast<std::uint64_t>(budget)));
}

inline std::vector<std::array<int, 3>> torus_basis(const TorusSpec& spec) {
    const int mmax = static_cast<int>(std::sqrt(spec.lambda_basis) * spec.L / (2.0 * pi)) + 1;
    std::vector<std::array<int, 3>> basis;
    const double qfac = 2.0 * pi / spec.L;
    for (int mx = -mmax; mx <= mmax; ++mx)
        for (int my = -mmax; my <= mmax; ++my)
            for (int mz = -mmax; mz <= mmax; ++mz) {
                const double q2 = qfac * qfac * (mx * mx + my * my + mz * mz);
                if (q2 <= spec.lambda_basis) basis.push_back({mx, my, mz});
            }
    std::sort(basis.begin(), basis.end(), [](const auto& a, const auto& b) {
        const long ra = long(a[0]) * a[0] + long(a[1]) * a[1] + long(a[2]) * a[2];
        const long rb = long(b[0]) * b[0] + long(b[1]) * b[1] + long(b[2]) * b[2];
        if (ra != rb) return ra < rb;
        return a < b;
    });
    return basis;
}

// True when every plane-wave phase e^{-i q . x0} is real (+-1), so the torus
// Hamiltonian can use the real symmetric path.
inline bool torus_phases_real(const Vec3& center, double L) {
    for (double c : {center.x, center.y, center.z}) {
        const double half = 2.0 * c / L; // phase is pi * half * k
        if (std::abs(half - std::round(half)) > 1e-12) return false;
    }
    return true;
}

} // namespace detail

inline HermitianOperator build_torus_hamiltonian(const TorusSpec& spec, const RadialKatoPotential& V) {
    spec.validate();
    V.validate();
    if (!(V.r_cut < 0.5 * spec.L)) throw domain_error("build_torus_hamiltonian: requires r_cut < L/2");

    HermitianOperator op;
    op.kind = GeometryKind::torus;
    op.box = spec.L;
    op.lambda_basis = spec.lambda_basis;
    op.basis = detail::torus_basis(spec);
    const std::size_t n = op.basis.size();
    op.is_real = (V.gamma == 0.0) || detail::torus_phases_real(V.center, spec.L);
    detail::enforce_memory_budget(n, !op.is_real);

    // radial transform table over the difference lattice, indexed by |k|^2
    int kmax2 = 0;
    {
        int mm = 0;
        for (const auto& m : op.basis)
            mm = std::max({mm, std::abs(m[0]), std::abs(m[1]), std::abs(m[2])});
        kmax2 = 3 * (2 * mm) * (2 * mm);
    }
    std::vector<double> stable(kmax2 + 1, 0.0);
    if (V.gamma != 0.0) {
        parallel_blocks(stable.size(), [&](std::size_t lo, std::size_t hi) {
            for (std::size_t k2 = lo; k2 < hi; ++k2)
                stable[k2] = radial_sinc_transform(V, 2.0 * pi * std::sqrt(static_cast<double>(k2)) / spec.L);
        });
    }
    const double volinv = 1.0 / (spec.L * spec.L * spec.L);
    const double qfac = 2.0 * pi / spec.L;

    auto vhat = [&](const std::array<int, 3>& k) -> std::complex<double> {
        if (V.gamma == 0.0) return {0.0, 0.0};
        const int k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        const double mag = V.gamma * volinv * stable[k2];
        const double phase = -qfac * (k[0] * V.center.x + k[1] * V.center.y + k[2] * V.center.z);
        return mag * std::complex<double>(std::cos(phase), std::sin(phase));
    };

    if (op.is_real) {
        op.Hr.resize(n, n);
        parallel_blocks(n, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                const auto& mi = op.basis[i];
                for (std::size_t j = 0; j < n; ++j) {
                    const auto& mj = op.basis[j];
                    const std::array<int, 3> k{mi[0] - mj[0], mi[1] - mj[1], mi[2] - mj[2]};
                    op.Hr(i, j) = vhat(k).real();
                }
                const double q2 = qfac * qfac * (mi[0] * mi[0] + mi[1] * mi[1] + mi[2] * mi[2]);
                op.Hr(i, i) += q2;
            }
        });
    } else {
        op.Hc.resize(n, n);
        parallel_blocks(n, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                const auto& mi = op.basis[i];
                for (std::size_t j = 0; j < n; ++j) {
                    const auto& mj = op.basis[j];
                    const std::array<int, 3> k{mi[0] - mj[0], mi[1] - mj[1], mi[2] - mj[2]};
                    op.Hc(i, j) = vhat(k);
                }
                const double q2 = qfac * qfac * (mi[0] * mi[0] + mi[1] * mi[1] + mi[2] * mi[2]);
                op.Hc(i, i) += q2;
            }
        });
    }
    return op;
}

inline HermitianOperator build_cube_hamiltonian(const CubeSpec& spec, const RadialKatoPotential& V) {
    spec.validate();
    V.validate();
    const Cube3 cube{spec.a};
    if (V.gamma != 0.0 && cube.boundary_distance(V.center) < 2.0 * V.r_cut)
        throw domain_error("build_cube_hamiltonian: potential support must keep an r_cut margin from the boundary");

    HermitianOperator op;
    op.kind = GeometryKind::cube;
    op.box = spec.a;
    op.lambda_basis = pi * pi * spec.m_max * spec.m_max / (spec.a * spec.a);
    for (int mx = 1; mx <= spec.m_max; ++mx)
        for (int my = 1; my <= spec.m_max; ++my)
            for (int mz = 1; mz <= spec.m_max; ++mz) op.basis.push_back({mx, my, mz});
    std::sort(op.basis.begin(), op.basis.end(), [](const auto& a, const auto& b) {
        const long ra = long(a[0]) * a[0] + long(a[1]) * a[1] + long(a[2]) * a[2];
        const long rb = long(b[0]) * b[0] + long(b[1]) * b[1] + long(b[2]) * b[2];
        if (ra != rb) return ra < rb;
        return a < b;
    });
    const std::size_t n = op.basis.size();
    op.is_real = true;
    detail::enforce_memory_budget(n, false);

    // cosine transform of the even extension: one radial table indexed by |k|^2
    const int kmax2 = 3 * (2 * spec.m_max) * (2 * spec.m_max);
    std::vector<double> ftable(kmax2 + 1, 0.0);
    if (V.gamma != 0.0) {
        parallel_blocks(ftable.size(), [&](std::size_t lo, std::size_t hi) {
            for (std::size_t k2 = lo; k2 < hi; ++k2)
                ftable[k2] = V.gamma * radial_sinc_transform(V, pi * std::sqrt(static_cast<double>(k2)) / spec.a);
        });
    }
    const double ainv3 = 1.0 / (spec.a * spec.a * spec.a);
    const double kc = pi / spec.a;

    op.Hr.resize(n, n);
    parallel_blocks(n, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const auto& mi = op.basis[i];
            for (std::size_t j = 0; j <= i; ++j) {
                const auto& mj = op.basis[j];
                double w = 0.0;
                if (V.gamma != 0.0) {
                    for (int e = 0; e < 8; ++e) {
                        const int k0 = (e & 1) ? mi[0] + mj[0] : mi[0] - mj[0];
                        const int k1 = (e & 2) ? mi[1] + mj[1] : mi[1] - mj[1];
                        const int k2c = (e & 4) ? mi[2] + mj[2] : mi[2] - mj[2];
                        const int bits = (e & 1) + ((e >> 1) & 1) + ((e >> 2) & 1);
                        const double sign = (bits % 2 == 0) ? 1.0 : -1.0;
                        const double f = ftable[k0 * k0 + k1 * k1 + k2c * k2c];
                        w += sign * f * std::cos(kc * k0 * V.center.x) * std::cos(kc * k1 * V.center.y) *
                             std::cos(kc * k2c * V.center.z);
                    }
                    w *= ainv3;
                }
                op.Hr(i, j) = w;
                op.Hr(j, i) = w;
            }
            const double q2 = kc * kc * (mi[0] * mi[0] + mi[1] * mi[1] + mi[2] * mi[2]);
            op.Hr(i, i) += q2;
        }
    });
    return op;
}

struct Spectrum {
    GeometryKind kind = GeometryKind::torus;
    double box = 1.0;
    double lambda_basis = 0.0;
    double t_trust = 0.0;
    bool complex_coeffs = false;
    std::vector<std::array<int, 3>> basis;
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd Cr;  // coefficient columns, real path
    Eigen::MatrixXcd Cc; // coefficient columns, complex path

    std::size_t size() const { return basis.size(); }
    double bottom() const { return eigenvalues.size() ? eigenvalues[0] : 0.0; }
};

inline Spectrum eigensolve(const HermitianOperator& op) {
    Spectrum s;
    s.kind = op.kind;
    s.box = op.box;
    s.lambda_basis = op.lambda_basis;
    s.t_trust = op.lambda_basis / 4.0;
    s.basis = op.basis;
    s.complex_coeffs = !op.is_real;
    if (op.is_real) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(op.Hr);
        if (solver.info() != Eigen::Success) throw numeric_error("eigensolve: dense symmetric solver failed");
        s.eigenvalues = solver.eigenvalues();
        s.Cr = solver.eigenvectors();
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(op.Hc);
        if (solver.info() != Eigen::Success) throw numeric_error("eigensolve: dense Hermitian solver failed");
        s.eigenvalues = solver.eigenvalues();
        s.Cc = solver.eigenvectors();
    }
    // orthonormality spot check
    const std::size_t n = s.size();
    if (n) {
        const std::size_t stride = std::max<std::size_t>(1, n / 7);
        for (std::size_t i = 0; i < n; i += stride)
            for (std::size_t j = i; j < n; j += stride) {
                const double target = (i == j) ? 1.0 : 0.0;
                const double dot = s.complex_coeffs ? std::abs(s.Cc.col(i).dot(s.Cc.col(j)))
                                                    : std::abs(s.Cr.col(i).dot(s.Cr.col(j)));
                if (std::abs(dot - target) > 1e-8)
                    throw numeric_error("eigensolve: eigenvector columns not orthonormal");
            }
    }
    return s;
}

// #{ n : lambda_n <= t } (right-continuous step convention).
inline std::size_t counting(const Spectrum& s, double t) {
    if (t > s.t_trust) throw trust_error("counting: t exceeds t_trust");
    const double* begin = s.eigenvalues.data();
    const double* end = begin + s.eigenvalues.size();
    return static_cast<std::size_t>(std::upper_bound(begin, end, t) - begin);
}

// |phi_n(x)|^2 for every mode, in eigenvalue order.
inline std::vector<double> mode_weights_at(const Spectrum& s, const Vec3& x) {
    const std::size_t n = s.size();
    std::vector<double> w(n, 0.0);
    if (s.kind == GeometryKind::torus) {
        const double qfac = 2.0 * pi / s.box;
        const double norm = 1.0 / std::pow(s.box, 3);
        Eigen::VectorXd cosv(n), sinv(n);
        for (std::size_t m = 0; m < n; ++m) {
            const double ph = qfac * (s.basis[m][0] * x.x + s.basis[m][1] * x.y + s.basis[m][2] * x.z);
            cosv[m] = std::cos(ph);
            sinv[m] = std::sin(ph);
        }
        if (!s.complex_coeffs) {
            const Eigen::VectorXd re = s.Cr.transpose() * cosv;
            const Eigen::VectorXd im = s.Cr.transpose() * sinv;
            for (std::size_t i = 0; i < n; ++i) w[i] = (re[i] * re[i] + im[i] * im[i]) * norm;
        } else {
            Eigen::VectorXcd b(n);
            for (std::size_t m = 0; m < n; ++m) b[m] = std::complex<double>(cosv[m], sinv[m]);
            const Eigen::VectorXcd v = s.Cc.transpose() * b;
            for (std::size_t i = 0; i < n; ++i) w[i] = std::norm(v[i]) * norm;
        }
    } else {
        const double kc = pi / s.box;
        const double norm = std::pow(2.0 / s.box, 3);
        Eigen::VectorXd b(n);
        for (std::size_t m = 0; m < n; ++m)
            b[m] = std::sin(kc * s.basis[m][0] * x.x) * std::sin(kc * s.basis[m][1] * x.y) *
                   std::sin(kc * s.basis[m][2] * x.z);
        const Eigen::VectorXd v = s.Cr.transpose() * b;
        for (std::size_t i = 0; i < n; ++i) w[i] = v[i] * v[i] * norm;
    }
    return w;
}

// Spectral-projection diagonal e(t,x) = sum_{lambda_n <= t} |phi_n(x)|^2.
inline double pointwise_density(const Spectrum& s, double t, const Vec3& x) {
    if (t > s.t_trust) throw trust_error("pointwise_density: t exceeds t_trust");
    const auto w = mode_weights_at(s, x);
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size() && s.eigenvalues[i] <= t; ++i) acc += w[i];
    return acc;
}

// Volume-matched effective cutoff: free counting reproduces the basis size.
inline double tail_cutoff(const Spectrum& s) {
    const double vol = s.box * s.box * s.box;
    return std::pow(6.0 * pi * pi * static_cast<double>(s.size()) / vol, 2.0 / 3.0);
}

// int_T^infty sqrt(t)/(4 pi^2) (t+lambda)^{-2} dt, closed form.
inline double free_tail_resolvent2(double T, double lambda) {
    const double sl = std::sqrt(lambda);
    const double sT = std::sqrt(T);
    return (1.0 / (4.0 * pi * pi)) * ((0.5 * pi - std::atan(sT / sl)) / sl + sT / (T + lambda));
}

// (-Delta + V + lambda)^{-2}(x,x) over computed modes; with the tail enabled
// the free continuum beyond the basis is added via the volume-matched cutoff.
inline double resolvent2_diag(const Spectrum& s, double lambda, const Vec3& x, bool tail = true) {
    if (!(lambda > -s.bottom())) throw pole_error("resolvent2_diag: lambda at or below -lambda_0");
    const auto w = mode_weights_at(s, x);
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double d = s.eigenvalues[i] + lambda;
        acc += w[i] / (d * d);
    }
    if (tail) acc += free_tail_resolvent2(tail_cutoff(s), lambda);
    return acc;
}

// ---------------------------------------------------------------------------
// binary cache

namespace detail {

inline std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hexdouble(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%a", v);
    return buf;
}

} // namespace detail

inline std::uint64_t spectrum_cache_key(GeometryKind kind, double box, double basis_param,
                                        const RadialKatoPotential& V) {
    std::string s = "weylspec-v1|";
    s += (kind == GeometryKind::torus) ? "torus|" : "cube|";
    s += detail::hexdouble(box) + "|" + detail::hexdouble(basis_param) + "|";
    s += detail::hexdouble(V.gamma) + "|" + detail::hexdouble(V.eta) + "|";
    s += detail::hexdouble(V.center.x) + "|" + detail::hexdouble(V.center.y) + "|" +
         detail::hexdouble(V.center.z) + "|";
    s += detail::hexdouble(V.r_cut) + "|";
    s += (V.cutoff == Cutoff::smooth) ? "smooth" : "indicator";
    return detail::fnv1a(s);
}

namespace detail {

constexpr std::uint64_t spectrum_magic = 0x5745594c53504543ull; // "WEYLSPEC"
constexpr std::uint32_t spectrum_version = 1;

template <class T>
void put(std::ofstream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
bool get(std::ifstream& in, T& v) {
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    return bool(in);
}

} // namespace detail

inline void save_spectrum(const Spectrum& s, std::uint64_t key, const std::filesystem::path& file) {
    std::filesystem::create_directories(file.parent_path());
    const auto tmp = file.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("save_spectrum: cannot open " + tmp);
        detail::put(out, detail::spectrum_magic);
        detail::put(out, detail::spectrum_version);
        detail::put(out, key);
        detail::put(out, static_cast<std::uint32_t>(s.kind));
        detail::put(out, static_cast<std::uint32_t>(s.complex_coeffs ? 1 : 0));
        detail::put(out, static_cast<std::uint64_t>(s.size()));
        detail::put(out, s.box);
        detail::put(out, s.lambda_basis);
        detail::put(out, s.t_trust);
        for (const auto& m : s.basis) {
            detail::put(out, static_cast<std::int32_t>(m[0]));
            detail::put(out, static_cast<std::int32_t>(m[1]));
            detail::put(out, static_cast<std::int32_t>(m[2]));
        }
        out.write(reinterpret_cast<const char*>(s.eigenvalues.data()),
                  static_cast<std::streamsize>(sizeof(double) * s.size()));
        if (s.complex_coeffs)
            out.write(reinterpret_cast<const char*>(s.Cc.data()),
                      static_cast<std::streamsize>(sizeof(double) * 2 * s.size() * s.size()));
        else
            out.write(reinterpret_cast<const char*>(s.Cr.data()),
                      static_cast<std::streamsize>(sizeof(double) * s.size() * s.size()));
        if (!out) throw std::runtime_error("save_spectrum: short write to " + tmp);
    }
    std::filesystem::rename(tmp, file);
}

inline std::optional<Spectrum> load_spectrum(std::uint64_t key, const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) return std::nullopt;
    std::uint64_t magic = 0, fkey = 0, n = 0;
    std::uint32_t version = 0, kind = 0, complexc = 0;
    if (!detail::get(in, magic) || magic != detail::spectrum_magic) return std::nullopt;
    if (!detail::get(in, version) || version != detail::spectrum_version) return std::nullopt;
    if (!detail::get(in, fkey) || fkey != key) return std::nullopt;
    if (!detail::get(in, kind) || !detail::get(in, complexc) || !detail::get(in, n)) return std::nullopt;
    Spectrum s;
    s.kind = static_cast<GeometryKind>(kind);
    s.complex_coeffs = complexc != 0;
    if (!detail::get(in, s.box) || !detail::get(in, s.lambda_basis) || !detail::get(in, s.t_trust)) return std::nullopt;
    s.basis.resize(n);
    for (auto& m : s.basis) {
        std::int32_t v[3];
        if (!detail::get(in, v[0]) || !detail::get(in, v[1]) || !detail::get(in, v[2])) return std::nullopt;
        m = {v[0], v[1], v[2]};
    }
    s.eigenvalues.resize(static_cast<Eigen::Index>(n));
    in.read(reinterpret_cast<char*>(s.eigenvalues.data()), static_cast<std::streamsize>(sizeof(double) * n));
    if (s.complex_coeffs) {
        s.Cc.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        in.read(reinterpret_cast<char*>(s.Cc.data()), static_cast<std::streamsize>(sizeof(double) * 2 * n * n));
    } else {
        s.Cr.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        in.read(reinterpret_cast<char*>(s.Cr.data()), static_cast<std::streamsize>(sizeof(double) * n * n));
    }
    if (!in) return std::nullopt;
    return s;
}

inline std::filesystem::path spectrum_cache_dir() {
    if (const char* env = std::getenv("WEYL_CACHE_DIR")) return env;
    return std::filesystem::temp_directory_path() / "weyl-cache";
}

struct SpectrumHandle {
    Spectrum spectrum;
    bool cache_hit = false;
    std::uint64_t key = 0;
};

inline SpectrumHandle torus_spectrum_cached(const TorusSpec& spec, const RadialKatoPotential& V,
                                            bool use_cache = true) {
    SpectrumHandle h;
    h.key = spectrum_cache_key(GeometryKind::torus, spec.L, spec.lambda_basis, V);
    const auto file = spectrum_cache_dir() / ("spec-" + std::to_string(h.key) + ".bin");
    if (use_cache)
        if (auto s = load_spectrum(h.key, file)) {
            h.spectrum = std::move(*s);
            h.cache_hit = true;
            return h;
        }
    h.spectrum = eigensolve(build_torus_hamiltonian(spec, V));
    if (use_cache) save_spectrum(h.spectrum, h.key, file);
    return h;
}

inline SpectrumHandle cube_spectrum_cached(const CubeSpec& spec, const RadialKatoPotential& V,
                                           bool use_cache = true) {
    SpectrumHandle h;
    h.key = spectrum_cache_key(GeometryKind::cube, spec.a, static_cast<double>(spec.m_max), V);
    const auto file = spectrum_cache_dir() / ("spec-" + std::to_string(h.key) + ".bin");
    if (use_cache)
        if (auto s = load_spectrum(h.key, file)) {
            h.spectrum = std::move(*s);
            h.cache_hit = true;
            return h;
        }
    h.spectrum = eigensolve(build_cube_hamiltonian(spec, V));
    if (use_cache) save_spectrum(h.spectrum, h.key, file);
    return h;
}

} // namespace weyl
