#pragma once

// Flat key-value experiment configuration with dotted sections, schema = 1.

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "weyl/correction.hpp"
#include "weyl/geometry.hpp"
#include "weyl/potential.hpp"
#include "weyl/spectral.hpp"

namespace weyl {

struct ExperimentConfig {
    GeometryKind kind = GeometryKind::torus;
    TorusSpec torus;
    CubeSpec cube;
    RadialKatoPotential potential;
    CorrectionParams correction;
    double tgrid_min = 10.0;
    double tgrid_max = -1.0; // <= 0 means "up to t_trust"
    int tgrid_points = 48;
    Vec3 x_far{0.5, 0.5, 0.5}; // reference point away from the singularity
    bool have_x_far = false;
    std::string output_dir = "out";
    bool write_csv = true, write_json = true, write_svg = false;
    bool use_cache = true;
    // optional assertions; violation turns the run into exit code 2
    std::map<std::string, double> asserts;

    void validate() const {
        if (kind == GeometryKind::torus)
            torus.validate();
        else
            cube.validate();
        potential.validate();
        correction.validate(potential);
        if (!(tgrid_min > 0.0)) throw domain_error("config: tgrid.min > 0");
        if (tgrid_points < 2) throw domain_error("config: tgrid.points >= 2");
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

inline Vec3 parse_vec3(const std::string& s, const std::string& key) {
    std::string t = s;
    for (char& c : t)
        if (c == ',') c = ' ';
    std::istringstream in(t);
    Vec3 v;
    if (!(in >> v.x >> v.y >> v.z)) throw domain_error("config: cannot parse 3-vector for " + key);
    return v;
}

} // namespace detail

inline ExperimentConfig parse_config_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw domain_error("config: missing '=' in line: " + line);
        kv[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
    }

    auto take = [&](const std::string& key) -> std::string {
        auto it = kv.find(key);
        if (it == kv.end()) return "";
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    auto take_num = [&](const std::string& key, double fallback) {
        const std::string v = take(key);
        return v.empty() ? fallback : std::stod(v);
    };

    const std::string schema = take("schema");
    if (schema != "1") throw domain_error("config: expected schema = 1");

    ExperimentConfig cfg;
    const std::string kind = take("geometry.kind");
    if (kind == "cube")
        cfg.kind = GeometryKind::cube;
    else if (kind == "torus" || kind.empty())
        cfg.kind = GeometryKind::torus;
    else
        throw domain_error("config: geometry.kind must be torus or cube");
    cfg.torus.L = take_num("geometry.L", 1.0);
    cfg.torus.lambda_basis = take_num("geometry.lambda_basis", 400.0);
    cfg.cube.a = take_num("geometry.a", 1.0);
    cfg.cube.m_max = static_cast<int>(take_num("geometry.m_max", 8));

    cfg.potential.gamma = take_num("potential.gamma", 0.0);
    cfg.potential.eta = take_num("potential.eta", 0.5);
    cfg.potential.r_cut = take_num("potential.r_cut", 0.2);
    const std::string center = take("potential.center");
    if (!center.empty()) cfg.potential.center = detail::parse_vec3(center, "potential.center");
    const std::string cutoff = take("potential.cutoff");
    if (cutoff == "indicator")
        cfg.potential.cutoff = Cutoff::indicator;
    else if (!cutoff.empty() && cutoff != "smooth")
        throw domain_error("config: potential.cutoff must be smooth or indicator");

    cfg.correction.epsilon = take_num("correction.epsilon", cfg.potential.r_cut);
    cfg.correction.max_n = static_cast<int>(take_num("correction.max_n", 2));
    cfg.correction.mc_samples = static_cast<std::size_t>(take_num("correction.mc_samples", 100000));
    cfg.correction.seed = static_cast<std::uint64_t>(take_num("correction.seed", 1));

    cfg.tgrid_min = take_num("tgrid.min", 10.0);
    const std::string tmax = take("tgrid.max");
    cfg.tgrid_max = (tmax.empty() || tmax == "trust") ? -1.0 : std::stod(tmax);
    cfg.tgrid_points = static_cast<int>(take_num("tgrid.points", 48));

    const std::string xf = take("report.x_far");
    if (!xf.empty()) {
        cfg.x_far = detail::parse_vec3(xf, "report.x_far");
        cfg.have_x_far = true;
    }
    const std::string odir = take("output.dir");
    if (!odir.empty()) cfg.output_dir = odir;
    const std::string formats = take("report.formats");
    if (!formats.empty()) {
        cfg.write_csv = formats.find("csv") != std::string::npos;
        cfg.write_json = formats.find("json") != std::string::npos;
        cfg.write_svg = formats.find("svg") != std::string::npos;
    }
    const std::string cache = take("cache.enabled");
    if (cache == "false" || cache == "0") cfg.use_cache = false;

    for (auto it = kv.begin(); it != kv.end();) {
        if (it->first.rfind("assert.", 0) == 0) {
            cfg.asserts[it->first.substr(7)] = std::stod(it->second);
            it = kv.erase(it);
        } else {
            ++it;
        }
    }
    if (!kv.empty()) throw domain_error("config: unknown key '" + kv.begin()->first + "'");
    cfg.validate();
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

} // namespace weyl
