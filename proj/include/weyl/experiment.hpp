#pragma once

// Experiment orchestration: spectra -> counting/density tables -> free and
// corrected Weyl predictions -> remainder-exponent fits -> CSV/JSON/SVG
// reports. File writes are atomic (write-temp-then-rename).

#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "weyl/config.hpp"
#include "weyl/correction.hpp"
#include "weyl/fit.hpp"
#include "weyl/sampling.hpp"
#include "weyl/spectral.hpp"

namespace weyl {

struct ReportRow {
    double t = 0.0;
    double N = 0.0;
    double e_x0 = 0.0;
    double weyl_free = 0.0;      // pointwise free term t^{3/2}/(6 pi^2)
    double weyl_corrected = 0.0; // pointwise corrected prediction at x0
    double resid_N = 0.0;        // N - vol * weyl_free
    double resid_e = 0.0;        // e_x0 - weyl_free
};

struct ExperimentResult {
    std::vector<ReportRow> rows;
    nlohmann::json summary;
    std::vector<std::string> failed_asserts;
    bool cache_hit = false;
    std::uint64_t cache_key = 0;
    std::filesystem::path csv_path, json_path, svg_path;
};

namespace detail {

inline std::string fmt_g(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

inline void atomic_write(const std::filesystem::path& file, const std::string& content) {
    std::filesystem::create_directories(file.parent_path());
    const auto tmp = file.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp);
        out << content;
        if (!out) throw std::runtime_error("short write to " + tmp);
    }
    std::filesystem::rename(tmp, file);
}

inline std::string timestamp_utc() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm{};
    gmtime_r(&tt, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

inline std::string render_csv(const std::vector<ReportRow>& rows) {
    std::string out = "t,N,e_x0,weyl_free,weyl_corrected,resid_N,resid_e\n";
    for (const auto& r : rows) {
        out += fmt_g(r.t) + "," + fmt_g(r.N) + "," + fmt_g(r.e_x0) + "," + fmt_g(r.weyl_free) + "," +
               fmt_g(r.weyl_corrected) + "," + fmt_g(r.resid_N) + "," + fmt_g(r.resid_e) + "\n";
    }
    return out;
}

// Static log-log chart of |resid_N| and |resid_e| against t. Annotation
// numbers are formatted with the same writer as the CSV cells.
inline std::string render_svg(const std::vector<ReportRow>& rows) {
    const int W = 860, H = 520, ml = 70, mr = 20, mt = 30, mb = 50;
    double tmin = 1e300, tmax = 0, rmin = 1e300, rmax = 0;
    for (const auto& r : rows) {
        tmin = std::min(tmin, r.t);
        tmax = std::max(tmax, r.t);
        for (double v : {std::abs(r.resid_N), std::abs(r.resid_e)})
            if (v > 0) {
                rmin = std::min(rmin, v);
                rmax = std::max(rmax, v);
            }
    }
    if (!(rmax > 0)) rmin = 0.1, rmax = 1.0;
    const double lx0 = std::log(tmin), lx1 = std::log(tmax);
    const double ly0 = std::log(rmin), ly1 = std::log(rmax);
    auto X = [&](double t) { return ml + (std::log(t) - lx0) / std::max(1e-12, lx1 - lx0) * (W - ml - mr); };
    auto Y = [&](double v) {
        return H - mb - (std::log(v) - ly0) / std::max(1e-12, ly1 - ly0) * (H - mt - mb);
    };
    auto polyline = [&](const char* color, auto getter) {
        std::string p = "  <polyline fill=\"none\" stroke=\"" + std::string(color) + "\" points=\"";
        for (const auto& r : rows) {
            const double v = std::abs(getter(r));
            if (v <= 0) continue;
            p += fmt_g(X(r.t)) + "," + fmt_g(Y(v)) + " ";
        }
        p += "\"/>\n";
        return p;
    };
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(W) +
                      "\" height=\"" + std::to_string(H) + "\">\n";
    svg += "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "  <text x=\"20\" y=\"20\">|N - free| and |e(t,x0) - free| (log-log)</text>\n";
    svg += polyline("steelblue", [](const ReportRow& r) { return r.resid_N; });
    svg += polyline("firebrick", [](const ReportRow& r) { return r.resid_e; });
    const auto& a = rows.front();
    const auto& b = rows.back();
    svg += "  <text x=\"" + std::to_string(ml) + "\" y=\"" + std::to_string(H - 18) + "\">t=" + fmt_g(a.t) +
           " resid_N=" + fmt_g(a.resid_N) + " resid_e=" + fmt_g(a.resid_e) + "</text>\n";
    svg += "  <text x=\"" + std::to_string(ml) + "\" y=\"" + std::to_string(H - 4) + "\">t=" + fmt_g(b.t) +
           " resid_N=" + fmt_g(b.resid_N) + " resid_e=" + fmt_g(b.resid_e) + "</text>\n";
    svg += "</svg>\n";
    return svg;
}

inline nlohmann::json fit_json(const FitResult& f) {
    return {{"slope", f.slope}, {"stderr", f.stderr_}, {"r2", f.r2}, {"n_points", f.n_points}};
}

} // namespace detail

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentResult res;

    SpectrumHandle handle = (cfg.kind == GeometryKind::torus)
                                ? torus_spectrum_cached(cfg.torus, cfg.potential, cfg.use_cache)
                                : cube_spectrum_cached(cfg.cube, cfg.potential, cfg.use_cache);
    const Spectrum& s = handle.spectrum;
    res.cache_hit = handle.cache_hit;
    res.cache_key = handle.key;

    const double vol = s.box * s.box * s.box;
    const double t_hi = (cfg.tgrid_max > 0.0) ? std::min(cfg.tgrid_max, s.t_trust) : s.t_trust;
    if (!(cfg.tgrid_min < t_hi)) throw domain_error("run_experiment: empty t-grid");

    // chain distances: min-image on the torus; inside the cube nothing wraps,
    // so a torus of side 2a provides plain Euclidean distances
    const Torus3 chain_geom{cfg.kind == GeometryKind::torus ? s.box : 2.0 * s.box};
    const Vec3 x0 = cfg.potential.center;

    const auto w0 = mode_weights_at(s, x0);
    std::vector<double> prefix(w0.size() + 1, 0.0);
    for (std::size_t i = 0; i < w0.size(); ++i) prefix[i + 1] = prefix[i] + w0[i];
    auto e_at = [&](double t) {
        const double* begin = s.eigenvalues.data();
        const auto k = std::upper_bound(begin, begin + s.eigenvalues.size(), t) - begin;
        return prefix[static_cast<std::size_t>(k)];
    };

    res.rows.reserve(cfg.tgrid_points);
    const double free_c = 1.0 / (6.0 * pi * pi);
    for (int i = 0; i < cfg.tgrid_points; ++i) {
        ReportRow row;
        row.t = cfg.tgrid_min * std::pow(t_hi / cfg.tgrid_min, double(i) / (cfg.tgrid_points - 1));
        row.N = static_cast<double>(counting(s, row.t));
        row.e_x0 = e_at(row.t);
        row.weyl_free = std::pow(row.t, 1.5) * free_c;
        if (cfg.potential.gamma != 0.0) {
            const auto series = r0_series(row.t, x0, cfg.potential, cfg.correction, chain_geom);
            row.weyl_corrected = row.weyl_free - 0.5 * series.value * std::pow(row.t, 1.5);
        } else {
            row.weyl_corrected = row.weyl_free;
        }
        row.resid_N = row.N - vol * row.weyl_free;
        row.resid_e = row.e_x0 - row.weyl_free;
        res.rows.push_back(row);
    }

    // fits on window-averaged residuals
    std::vector<double> ts, rN, rE;
    for (const auto& r : res.rows) {
        ts.push_back(r.t);
        rN.push_back(r.resid_N);
        rE.push_back(r.resid_e);
    }
    const auto [wtN, wrN] = window_average_abs(ts, rN);
    const auto [wtE, wrE] = window_average_abs(ts, rE);
    nlohmann::json fits;
    try {
        fits["resid_N"] = detail::fit_json(fit_remainder_exponent(wtN, wrN));
    } catch (const std::exception& e) {
        fits["resid_N"] = {{"error", e.what()}};
    }
    try {
        fits["resid_e_x0"] = detail::fit_json(fit_remainder_exponent(wtE, wrE));
    } catch (const std::exception& e) {
        fits["resid_e_x0"] = {{"error", e.what()}};
    }
    // pinned-exponent coefficient of the singular correction at x0
    const double pinned_exp = 0.5 * (3.0 - cfg.potential.eta);
    nlohmann::json pinned;
    pinned["exponent"] = pinned_exp;
    if (cfg.potential.gamma != 0.0) {
        try {
            const double coef = pinned_coefficient(wtE, wrE, pinned_exp);
            const double expected = 0.5 * std::abs(cfg.potential.gamma) * xi_eta_zero_closed(cfg.potential.eta);
            pinned["coefficient"] = coef;
            pinned["expected_coefficient"] = expected;
            pinned["ratio"] = coef / expected;
        } catch (const std::exception& e) {
            pinned["error"] = e.what();
        }
    }
    fits["resid_e_x0_pinned"] = pinned;

    // reference point away from the singularity
    const double dfar = chain_geom.distance(cfg.x_far, x0);
    if (dfar > cfg.correction.epsilon + cfg.potential.r_cut) {
        const auto wf = mode_weights_at(s, cfg.x_far);
        std::vector<double> pre(wf.size() + 1, 0.0);
        for (std::size_t i = 0; i < wf.size(); ++i) pre[i + 1] = pre[i] + wf[i];
        std::vector<double> rF;
        for (const auto& r : res.rows) {
            const double* begin = s.eigenvalues.data();
            const auto k = std::upper_bound(begin, begin + s.eigenvalues.size(), r.t) - begin;
            rF.push_back(pre[static_cast<std::size_t>(k)] - r.weyl_free);
        }
        const auto [wtF, wrF] = window_average_abs(ts, rF);
        try {
            fits["resid_e_far"] = detail::fit_json(fit_remainder_exponent(wtF, wrF));
        } catch (const std::exception& e) {
            fits["resid_e_far"] = {{"error", e.what()}};
        }
    }

    const double t_top = res.rows.back().t;
    const double leading_ratio =
        res.rows.back().N * 6.0 * pi * pi / (std::pow(t_top, 1.5) * vol);

    nlohmann::json summary;
    summary["schema"] = 1;
    summary["geometry"] =
        (cfg.kind == GeometryKind::torus)
            ? nlohmann::json{{"kind", "torus"}, {"L", cfg.torus.L}, {"lambda_basis", cfg.torus.lambda_basis}}
            : nlohmann::json{{"kind", "cube"}, {"a", cfg.cube.a}, {"m_max", cfg.cube.m_max}};
    summary["potential"] = {{"gamma", cfg.potential.gamma},
                            {"eta", cfg.potential.eta},
                            {"center", {cfg.potential.center.x, cfg.potential.center.y, cfg.potential.center.z}},
                            {"r_cut", cfg.potential.r_cut}};
    summary["correction_params"] = {{"epsilon", cfg.correction.epsilon},
                                    {"max_n", cfg.correction.max_n},
                                    {"mc_samples", cfg.correction.mc_samples},
                                    {"seed", cfg.correction.seed}};
    summary["spectrum"] = {{"basis_size", s.size()},
                           {"t_trust", s.t_trust},
                           {"lambda_basis", s.lambda_basis},
                           {"cache_hit", res.cache_hit},
                           {"key", std::to_string(res.cache_key)}};
    summary["tgrid"] = {{"min", cfg.tgrid_min}, {"max", t_hi}, {"points", cfg.tgrid_points}};
    summary["weyl_leading_ratio"] = leading_ratio;
    summary["fits"] = fits;

    // configured assertions
    nlohmann::json asserts = nlohmann::json::object();
    auto metric = [&](const std::string& name) -> double {
        if (name == "weyl_leading_ratio") return leading_ratio;
        if (name == "resid_e_slope") return fits["resid_e_x0"].value("slope", 1e99);
        if (name == "resid_N_slope") return fits["resid_N"].value("slope", 1e99);
        if (name == "pinned_coeff_ratio") return fits["resid_e_x0_pinned"].value("ratio", 1e99);
        throw domain_error("unknown assert metric: " + name);
    };
    for (const auto& [key, limit] : cfg.asserts) {
        // key is "<metric>_min" or "<metric>_max"
        const bool is_min = key.size() > 4 && key.substr(key.size() - 4) == "_min";
        const bool is_max = key.size() > 4 && key.substr(key.size() - 4) == "_max";
        if (!is_min && !is_max) throw domain_error("assert key must end in _min or _max: " + key);
        const std::string name = key.substr(0, key.size() - 4);
        const double value = metric(name);
        const bool ok = is_min ? value >= limit : value <= limit;
        asserts[key] = {{"value", value}, {"limit", limit}, {"ok", ok}};
        if (!ok) res.failed_asserts.push_back(key);
    }
    summary["asserts"] = asserts;
    res.summary = summary;

    // reports
    const std::filesystem::path dir = cfg.output_dir;
    if (cfg.write_csv) {
        res.csv_path = dir / "report.csv";
        detail::atomic_write(res.csv_path, detail::render_csv(res.rows));
    }
    if (cfg.write_json) {
        nlohmann::json with_meta = summary;
        with_meta["meta"] = {{"timestamp", detail::timestamp_utc()}};
        res.json_path = dir / "summary.json";
        detail::atomic_write(res.json_path, with_meta.dump(1) + "\n");
    }
    if (cfg.write_svg) {
        res.svg_path = dir / "plot.svg";
        detail::atomic_write(res.svg_path, detail::render_svg(res.rows));
    }
    return res;
}

} // namespace weyl
