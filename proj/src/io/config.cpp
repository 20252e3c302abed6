#include "dsre/io/io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace dsre::io {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<double> parse_vector(const std::string& v, const std::string& key) {
    std::vector<double> out;
    std::string item;
    std::stringstream ss(v);
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        size_t pos = 0;
        double x;
        try {
            x = std::stod(item, &pos);
        } catch (const std::exception&) {
            throw ConfigError("key `" + key + "`: cannot parse number '" + item + "'");
        }
        if (pos != item.size()) {
            throw ConfigError("key `" + key + "`: trailing characters in '" + item + "'");
        }
        out.push_back(x);
    }
    if (out.empty()) throw ConfigError("key `" + key + "` has no values");
    return out;
}

struct Section {
    std::map<std::string, std::string> kv;
};

} // namespace

RunConfig parse_config_text(const std::string& text) {
    std::map<std::string, Section> sections;
    std::string current;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') {
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section");
            }
            current = trim(line.substr(1, line.size() - 2));
            if (current != "model" && current != "bekk" && current != "ccc") {
                throw ConfigError("unknown section [" + current + "]");
            }
            sections[current];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        }
        if (current.empty()) {
            throw ConfigError("line " + std::to_string(lineno) + ": key outside any section");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (sections[current].kv.count(key)) {
            throw ConfigError("duplicate key `" + key + "` in [" + current + "]");
        }
        sections[current].kv[key] = val;
    }

    static const std::set<std::string> model_keys{"d",      "seed",  "length", "burn_in",
                                                  "m_dist", "q_law", "b",      "c",
                                                  "a",      "sigma"};
    static const std::set<std::string> bekk_keys{"c", "sigma"};
    static const std::set<std::string> ccc_keys{"a", "b", "c", "sigma"};

    RunConfig cfg;
    auto check_keys = [&](const std::string& sec, const std::set<std::string>& allowed) {
        for (const auto& [k, v] : sections[sec].kv) {
            if (!allowed.count(k)) {
                throw ConfigError("unknown key `" + k + "` in [" + sec + "]");
            }
        }
    };
    if (!sections.count("model")) throw ConfigError("missing [model] section");
    check_keys("model", model_keys);

    auto& mk = sections["model"].kv;
    auto need = [&](std::map<std::string, std::string>& kv, const std::string& key,
                    const std::string& sec) -> std::string {
        auto it = kv.find(key);
        if (it == kv.end()) {
            throw ConfigError("missing key `" + key + "` in [" + sec + "]");
        }
        return it->second;
    };
    if (mk.count("seed")) cfg.seed = std::stoull(mk["seed"]);
    if (mk.count("length")) cfg.length = std::stoll(mk["length"]);
    if (mk.count("burn_in")) cfg.burn_in = std::stoll(mk["burn_in"]);

    const bool has_bekk = sections.count("bekk") > 0;
    const bool has_ccc = sections.count("ccc") > 0;
    if (has_bekk && has_ccc) throw ConfigError("config has both [bekk] and [ccc]");

    if (has_bekk) {
        check_keys("bekk", bekk_keys);
        auto& bk = sections["bekk"].kv;
        cfg.kind = "bekk";
        cfg.c = parse_vector(need(bk, "c", "bekk"), "c");
        cfg.sigma = parse_vector(need(bk, "sigma", "bekk"), "sigma");
    } else if (has_ccc) {
        check_keys("ccc", ccc_keys);
        auto& ck = sections["ccc"].kv;
        cfg.kind = ck.count("sigma") ? "ccc_general" : "ccc";
        cfg.a = parse_vector(need(ck, "a", "ccc"), "a");
        cfg.b = parse_vector(need(ck, "b", "ccc"), "b");
        cfg.c = parse_vector(need(ck, "c", "ccc"), "c");
        if (ck.count("sigma")) cfg.sigma = parse_vector(ck["sigma"], "sigma");
    } else {
        cfg.kind = "generic";
        cfg.m_dist = need(mk, "m_dist", "model");
        cfg.q_law = need(mk, "q_law", "model");
        cfg.b = parse_vector(need(mk, "b", "model"), "b");
        cfg.c = parse_vector(need(mk, "c", "model"), "c");
        if (mk.count("a")) cfg.a = parse_vector(mk["a"], "a");
        if (mk.count("sigma")) cfg.sigma = parse_vector(mk["sigma"], "sigma");
    }

    cfg.d = mk.count("d") ? static_cast<int>(std::stoll(mk["d"]))
                          : static_cast<int>(cfg.c.size());
    if (cfg.d != static_cast<int>(cfg.c.size())) {
        throw ConfigError("key `d` = " + std::to_string(cfg.d) + " but `c` has " +
                          std::to_string(cfg.c.size()) + " entries");
    }
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

BuiltModel build_from_config(const RunConfig& cfg) {
    if (cfg.kind == "bekk") {
        return build_bekk(cfg.c, cfg.sigma);
    }
    if (cfg.kind == "ccc") {
        return build_ccc_degenerate(cfg.a, cfg.b, cfg.c);
    }
    if (cfg.kind == "ccc_general") {
        return build_ccc_general(cfg.a, cfg.b, cfg.c, cfg.sigma);
    }
    // generic
    ScalarDist m = ScalarDist::standard_normal();
    if (cfg.m_dist == "normal") {
        m = ScalarDist::standard_normal();
    } else if (cfg.m_dist == "chisq1") {
        m = ScalarDist::chi_square_1();
    } else if (cfg.m_dist.rfind("pointmass:", 0) == 0) {
        m = ScalarDist::point_mass(std::stod(cfg.m_dist.substr(10)));
    } else {
        throw ConfigError("unknown m_dist '" + cfg.m_dist + "'");
    }
    std::vector<AffineFactor> factors;
    if (cfg.b.size() != cfg.c.size()) throw ConfigError("b and c length mismatch");
    for (size_t i = 0; i < cfg.c.size(); ++i) factors.push_back({cfg.b[i], cfg.c[i], m});
    QLaw q;
    if (cfg.q_law == "gaussian") {
        if (cfg.sigma.empty()) throw ConfigError("missing key `sigma` in [model]");
        GaussianVector g;
        g.chol = cholesky_psd(cfg.sigma, cfg.d);
        g.sigma = cfg.sigma;
        q = std::move(g);
    } else if (cfg.q_law == "constant") {
        if (cfg.a.empty()) throw ConfigError("missing key `a` in [model]");
        q = ConstantVector{cfg.a};
    } else {
        throw ConfigError("unknown q_law '" + cfg.q_law + "'");
    }
    return build_generic(std::move(factors), std::move(q));
}

} // namespace dsre::io
