#include "fdct/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include "fdct/errors.hpp"

namespace fdct {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream is(s);
    while (std::getline(is, item, sep)) out.push_back(trim(item));
    return out;
}

// Shortest decimal text that parses back to the same double.
std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    for (int prec = 6; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& text, const std::string& path) {
    if (text == "inf") return std::numeric_limits<double>::infinity();
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0')
        throw ConfigError(path, "expected a number, got '" + text + "'");
    return v;
}

std::int64_t parse_int(const std::string& text, const std::string& path) {
    char* end = nullptr;
    const long long v = std::strtoll(text.c_str(), &end, 10);
    if (end == text.c_str() || *end != '\0')
        throw ConfigError(path, "expected an integer, got '" + text + "'");
    return static_cast<std::int64_t>(v);
}

bool parse_bool(const std::string& text, const std::string& path) {
    if (text == "true") return true;
    if (text == "false") return false;
    throw ConfigError(path, "expected true/false, got '" + text + "'");
}

struct Field {
    std::string section;
    std::string key;
    std::function<std::string(const RunConfig&)> get;
    std::function<void(RunConfig&, const std::string&, const std::string&)> set;
};

std::vector<Field> build_schema() {
    std::vector<Field> f;
    auto add_i64 = [&f](const char* sec, const char* key, auto acc) {
        f.push_back({sec, key,
                     [acc](const RunConfig& c) {
                         return std::to_string(acc(const_cast<RunConfig&>(c)));
                     },
                     [acc](RunConfig& c, const std::string& v, const std::string& p) {
                         acc(c) = parse_int(v, p);
                     }});
    };
    auto add_f64 = [&f](const char* sec, const char* key, auto acc) {
        f.push_back({sec, key,
                     [acc](const RunConfig& c) {
                         return format_double(acc(const_cast<RunConfig&>(c)));
                     },
                     [acc](RunConfig& c, const std::string& v, const std::string& p) {
                         acc(c) = parse_double(v, p);
                     }});
    };
    auto add_bool = [&f](const char* sec, const char* key, auto acc) {
        f.push_back({sec, key,
                     [acc](const RunConfig& c) {
                         return acc(const_cast<RunConfig&>(c)) ? std::string("true")
                                                               : std::string("false");
                     },
                     [acc](RunConfig& c, const std::string& v, const std::string& p) {
                         acc(c) = parse_bool(v, p);
                     }});
    };
    auto add_str = [&f](const char* sec, const char* key, auto acc) {
        f.push_back({sec, key,
                     [acc](const RunConfig& c) { return acc(const_cast<RunConfig&>(c)); },
                     [acc](RunConfig& c, const std::string& v, const std::string&) {
                         acc(c) = v;
                     }});
    };

    f.push_back({"run", "seed",
                 [](const RunConfig& c) { return std::to_string(c.run.seed); },
                 [](RunConfig& c, const std::string& v, const std::string& p) {
                     c.run.seed = static_cast<std::uint64_t>(parse_int(v, p));
                 }});

    add_i64("geometry", "image_size", [](RunConfig& c) -> auto& { return c.geometry.image_size; });
    add_i64("geometry", "n_views", [](RunConfig& c) -> auto& { return c.geometry.n_views; });
    add_i64("geometry", "n_detectors",
            [](RunConfig& c) -> auto& { return c.geometry.n_detectors; });
    add_f64("geometry", "source_to_center",
            [](RunConfig& c) -> auto& { return c.geometry.source_to_center; });
    add_f64("geometry", "center_to_detector",
            [](RunConfig& c) -> auto& { return c.geometry.center_to_detector; });
    add_f64("geometry", "detector_width",
            [](RunConfig& c) -> auto& { return c.geometry.detector_width; });

    add_f64("dose", "photon_count", [](RunConfig& c) -> auto& { return c.dose.photon_count; });
    add_f64("dose", "electronic_sigma",
            [](RunConfig& c) -> auto& { return c.dose.electronic_sigma; });

    add_i64("schedule", "steps", [](RunConfig& c) -> auto& { return c.schedule.steps; });
    add_str("schedule", "kind", [](RunConfig& c) -> auto& { return c.schedule.kind; });

    add_f64("frequency", "sigma", [](RunConfig& c) -> auto& { return c.frequency.sigma; });

    add_i64("fhd", "patch_size", [](RunConfig& c) -> auto& { return c.fhd.patch_size; });
    add_i64("fhd", "embed_dim", [](RunConfig& c) -> auto& { return c.fhd.embed_dim; });
    add_i64("fhd", "n_heads", [](RunConfig& c) -> auto& { return c.fhd.n_heads; });
    add_i64("fhd", "window", [](RunConfig& c) -> auto& { return c.fhd.window; });
    f.push_back({"fhd", "dilations",
                 [](const RunConfig& c) {
                     std::string out;
                     for (std::size_t i = 0; i < c.fhd.dilations.size(); ++i) {
                         if (i) out += ",";
                         out += std::to_string(c.fhd.dilations[i]);
                     }
                     return out;
                 },
                 [](RunConfig& c, const std::string& v, const std::string& p) {
                     c.fhd.dilations.clear();
                     for (const auto& item : split(v, ','))
                         c.fhd.dilations.push_back(static_cast<int>(parse_int(item, p)));
                 }});
    f.push_back({"fhd", "layout",
                 [](const RunConfig& c) {
                     std::string out;
                     for (std::size_t i = 0; i < c.fhd.module_layout.size(); ++i) {
                         if (i) out += ",";
                         out += to_string(c.fhd.module_layout[i]);
                     }
                     return out;
                 },
                 [](RunConfig& c, const std::string& v, const std::string& p) {
                     c.fhd.module_layout.clear();
                     for (const auto& item : split(v, ',')) {
                         if (item == "mhsa")
                             c.fhd.module_layout.push_back(AttnModuleKind::mhsa);
                         else if (item == "mhda")
                             c.fhd.module_layout.push_back(AttnModuleKind::mhda);
                         else
                             throw ConfigError(p, "layout entries must be mhsa or mhda");
                     }
                 }});
    f.push_back({"fhd", "skips",
                 [](const RunConfig& c) {
                     std::string out;
                     for (std::size_t i = 0; i < c.fhd.skip_links.size(); ++i) {
                         if (i) out += ",";
                         out += std::to_string(c.fhd.skip_links[i].first) + ">" +
                                std::to_string(c.fhd.skip_links[i].second);
                     }
                     return out;
                 },
                 [](RunConfig& c, const std::string& v, const std::string& p) {
                     c.fhd.skip_links.clear();
                     if (trim(v).empty()) return;
                     for (const auto& item : split(v, ',')) {
                         const auto pos = item.find('>');
                         if (pos == std::string::npos)
                             throw ConfigError(p, "skip link must look like 1>10");
                         c.fhd.skip_links.emplace_back(
                             static_cast<int>(parse_int(trim(item.substr(0, pos)), p)),
                             static_cast<int>(parse_int(trim(item.substr(pos + 1)), p)));
                     }
                 }});

    add_i64("unet", "depth", [](RunConfig& c) -> auto& { return c.unet.depth; });
    add_i64("unet", "base_channels", [](RunConfig& c) -> auto& { return c.unet.base_channels; });
    add_i64("unet", "time_embed_dim", [](RunConfig& c) -> auto& { return c.unet.time_embed_dim; });

    add_i64("ldf", "hidden_channels", [](RunConfig& c) -> auto& { return c.ldf.hidden_channels; });
    add_i64("ldf", "n_layers", [](RunConfig& c) -> auto& { return c.ldf.n_layers; });
    add_i64("ldf", "kernel", [](RunConfig& c) -> auto& { return c.ldf.kernel; });

    add_bool("denoiser", "use_fhd", [](RunConfig& c) -> auto& { return c.denoiser.use_fhd; });
    add_bool("denoiser", "use_fld", [](RunConfig& c) -> auto& { return c.denoiser.use_fld; });
    add_str("denoiser", "fusion", [](RunConfig& c) -> auto& { return c.denoiser.fusion; });

    add_f64("train", "learning_rate",
            [](RunConfig& c) -> auto& { return c.train.learning_rate; });
    add_i64("train", "iterations", [](RunConfig& c) -> auto& { return c.train.iterations; });
    add_i64("train", "batch_size", [](RunConfig& c) -> auto& { return c.train.batch_size; });
    add_str("train", "loss", [](RunConfig& c) -> auto& { return c.train.loss; });
    add_i64("train", "checkpoint_interval",
            [](RunConfig& c) -> auto& { return c.train.checkpoint_interval; });
    add_i64("train", "pairs", [](RunConfig& c) -> auto& { return c.train.pairs; });
    add_i64("train", "pair_views", [](RunConfig& c) -> auto& { return c.train.pair_views; });
    add_i64("train", "pair_detectors",
            [](RunConfig& c) -> auto& { return c.train.pair_detectors; });
    f.push_back({"train", "pair_doses",
                 [](const RunConfig& c) {
                     std::string out;
                     for (std::size_t i = 0; i < c.train.pair_doses.size(); ++i) {
                         if (i) out += ",";
                         out += format_double(c.train.pair_doses[i]);
                     }
                     return out;
                 },
                 [](RunConfig& c, const std::string& v, const std::string& p) {
                     c.train.pair_doses.clear();
                     for (const auto& item : split(v, ','))
                         c.train.pair_doses.push_back(parse_double(item, p));
                 }});

    add_bool("pwls", "enabled", [](RunConfig& c) -> auto& { return c.pwls.enabled; });
    add_f64("pwls", "eta", [](RunConfig& c) -> auto& { return c.pwls.eta; });
    add_f64("pwls", "mu", [](RunConfig& c) -> auto& { return c.pwls.mu; });
    add_str("pwls", "mode", [](RunConfig& c) -> auto& { return c.pwls.mode; });
    add_bool("pwls", "freeze_weights",
             [](RunConfig& c) -> auto& { return c.pwls.freeze_weights; });
    add_bool("pwls", "prior_in_update",
             [](RunConfig& c) -> auto& { return c.pwls.prior_in_update; });

    add_bool("tv", "enabled", [](RunConfig& c) -> auto& { return c.tv.enabled; });
    add_f64("tv", "alpha", [](RunConfig& c) -> auto& { return c.tv.alpha; });
    add_i64("tv", "iterations", [](RunConfig& c) -> auto& { return c.tv.iterations; });
    add_f64("tv", "epsilon", [](RunConfig& c) -> auto& { return c.tv.epsilon; });

    add_bool("recon", "renoise", [](RunConfig& c) -> auto& { return c.recon.renoise; });
    add_str("recon", "fbp_window", [](RunConfig& c) -> auto& { return c.recon.fbp_window; });

    add_i64("ablate", "iterations", [](RunConfig& c) -> auto& { return c.ablate.iterations; });
    add_i64("ablate", "pairs", [](RunConfig& c) -> auto& { return c.ablate.pairs; });
    add_i64("ablate", "eval_count", [](RunConfig& c) -> auto& { return c.ablate.eval_count; });
    return f;
}

const std::vector<Field>& schema() {
    static const std::vector<Field> fields = build_schema();
    return fields;
}

const Field* find_field(const std::string& section, const std::string& key) {
    for (const auto& fld : schema())
        if (fld.section == section && fld.key == key) return &fld;
    return nullptr;
}

bool known_section(const std::string& section) {
    for (const auto& fld : schema())
        if (fld.section == section) return true;
    return false;
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream is(text);
    std::string line, section;
    std::set<std::string> seen;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(line_no), "malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!known_section(section)) throw ConfigError(section, "unknown section");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no), "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty())
            throw ConfigError(key, "key outside of any [section]");
        const std::string path = section + "." + key;
        const Field* fld = find_field(section, key);
        if (!fld) throw ConfigError(path, "unknown key");
        if (!seen.insert(path).second) throw ConfigError(path, "duplicate key");
        fld->set(cfg, value, path);
    }
    validate_config(cfg);
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config_text(buf.str());
}

std::string resolve_config(const RunConfig& cfg) {
    std::ostringstream os;
    std::string section;
    for (const auto& fld : schema()) {
        if (fld.section != section) {
            if (!section.empty()) os << "\n";
            section = fld.section;
            os << "[" << section << "]\n";
        }
        os << fld.key << " = " << fld.get(cfg) << "\n";
    }
    return os.str();
}

void validate_config(const RunConfig& cfg) {
    make_geometry(cfg).validate();
    if (cfg.geometry.image_size < 8) throw ConfigError("geometry.image_size", "must be >= 8");
    if (!(cfg.dose.photon_count > 0.0)) throw ConfigError("dose.photon_count", "must be > 0");
    if (cfg.dose.electronic_sigma < 0.0)
        throw ConfigError("dose.electronic_sigma", "must be >= 0");
    if (cfg.schedule.kind != "linear")
        throw ConfigError("schedule.kind", "unsupported kind '" + cfg.schedule.kind + "'");
    // steps = 0 degenerates reconstruction to the plain FBP baseline;
    // training needs at least one step.
    if (cfg.schedule.steps < 0) throw ConfigError("schedule.steps", "must be >= 0");
    make_denoiser_config(cfg);  // validates fhd/unet/ldf/frequency/denoiser
    if (cfg.train.loss != "l1" && cfg.train.loss != "l2")
        throw ConfigError("train.loss", "must be l1 or l2");
    if (cfg.train.learning_rate <= 0.0)
        throw ConfigError("train.learning_rate", "must be > 0");
    if (cfg.train.iterations < 1) throw ConfigError("train.iterations", "must be >= 1");
    if (cfg.train.batch_size < 1) throw ConfigError("train.batch_size", "must be >= 1");
    if (cfg.train.checkpoint_interval < 1)
        throw ConfigError("train.checkpoint_interval", "must be >= 1");
    if (cfg.train.pairs < 1) throw ConfigError("train.pairs", "must be >= 1");
    if (cfg.train.pair_doses.empty()) throw ConfigError("train.pair_doses", "must not be empty");
    for (double d : cfg.train.pair_doses)
        if (!(d > 0.0)) throw ConfigError("train.pair_doses", "doses must be > 0");
    const std::int64_t div = std::max(cfg.fhd.patch_size, std::int64_t{1} << cfg.unet.depth);
    auto check_div = [&](const char* path, std::int64_t v) {
        if (v % cfg.fhd.patch_size != 0 || v % (std::int64_t{1} << cfg.unet.depth) != 0)
            throw ConfigError(path, "must be divisible by patch_size and 2^unet.depth (= " +
                                        std::to_string(div) + ")");
    };
    check_div("geometry.n_views", cfg.geometry.n_views);
    check_div("geometry.n_detectors", cfg.geometry.n_detectors);
    check_div("train.pair_views", cfg.train.pair_views);
    check_div("train.pair_detectors", cfg.train.pair_detectors);
    if (cfg.pwls.mode != "corrected" && cfg.pwls.mode != "literal")
        throw ConfigError("pwls.mode", "must be corrected or literal");
    if (!(cfg.pwls.eta > 0.0)) throw ConfigError("pwls.eta", "must be > 0");
    if (cfg.pwls.mu < 0.0) throw ConfigError("pwls.mu", "must be >= 0");
    if (cfg.tv.alpha < 0.0) throw ConfigError("tv.alpha", "must be >= 0");
    if (cfg.tv.iterations < 1) throw ConfigError("tv.iterations", "must be >= 1");
    if (!(cfg.tv.epsilon > 0.0)) throw ConfigError("tv.epsilon", "must be > 0");
    if (cfg.recon.fbp_window != "hann" && cfg.recon.fbp_window != "ramp")
        throw ConfigError("recon.fbp_window", "must be hann or ramp");
    if (cfg.ablate.iterations < 1) throw ConfigError("ablate.iterations", "must be >= 1");
    if (cfg.ablate.pairs < 1) throw ConfigError("ablate.pairs", "must be >= 1");
    if (cfg.ablate.eval_count < 1) throw ConfigError("ablate.eval_count", "must be >= 1");
}

std::vector<std::string> architecture_diff(const RunConfig& a, const RunConfig& b) {
    static const std::set<std::string> arch_sections = {"schedule", "frequency", "fhd",
                                                        "unet",     "ldf",       "denoiser"};
    std::vector<std::string> diffs;
    for (const auto& fld : schema()) {
        if (!arch_sections.count(fld.section)) continue;
        const std::string va = fld.get(a), vb = fld.get(b);
        if (va != vb)
            diffs.push_back(fld.section + "." + fld.key + ": " + va + " vs " + vb);
    }
    return diffs;
}

FanGeometry make_geometry(const RunConfig& cfg) {
    FanGeometry g;
    g.source_to_center = cfg.geometry.source_to_center;
    g.center_to_detector = cfg.geometry.center_to_detector;
    g.detector_width = cfg.geometry.detector_width;
    g.n_detectors = cfg.geometry.n_detectors;
    g.n_views = cfg.geometry.n_views;
    return g;
}

FanGeometry make_pair_geometry(const RunConfig& cfg) {
    FanGeometry g = make_geometry(cfg);
    g.n_views = cfg.train.pair_views;
    g.n_detectors = cfg.train.pair_detectors;
    return g;
}

DenoiserConfig make_denoiser_config(const RunConfig& cfg) {
    DenoiserConfig d;
    d.fhd = cfg.fhd;
    d.unet = cfg.unet;
    d.ldf = cfg.ldf;
    d.use_fhd = cfg.denoiser.use_fhd;
    d.use_fld = cfg.denoiser.use_fld;
    if (cfg.denoiser.fusion == "ldf")
        d.fusion = FusionMode::ldf;
    else if (cfg.denoiser.fusion == "sum_lh")
        d.fusion = FusionMode::sum_lh;
    else
        throw ConfigError("denoiser.fusion", "must be ldf or sum_lh");
    d.sigma = cfg.frequency.sigma;
    d.total_steps = std::max<std::int64_t>(cfg.schedule.steps, 1);
    d.validate();
    return d;
}

LossNorm loss_norm(const RunConfig& cfg) {
    return cfg.train.loss == "l1" ? LossNorm::l1 : LossNorm::l2;
}

PwlsMode pwls_mode(const RunConfig& cfg) {
    return cfg.pwls.mode == "literal" ? PwlsMode::literal : PwlsMode::corrected;
}

}  // namespace fdct
