#include "expstable/io.hpp"

#include <charconv>
#include <cmath>
#include <system_error>

#include "expstable/errors.hpp"

namespace expstable {

std::string format_double(double x) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
    if (text == "inf") return kInf;
    if (text == "-inf") return -kInf;
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw ConfigurationError("could not parse number: '" + std::string(text) + "'");
    }
    return value;
}

std::string to_csv(const PointConfiguration& cfg) {
    std::string out = "position,mass\n";
    for (const Atom& a : cfg.atoms()) {
        out += format_double(a.position);
        out += ',';
        out += format_double(a.mass);
        out += '\n';
    }
    return out;
}

PointConfiguration config_from_csv(std::string_view csv) {
    std::vector<Atom> atoms;
    std::size_t pos = 0;
    bool header_seen = false;
    while (pos < csv.size()) {
        std::size_t eol = csv.find('\n', pos);
        if (eol == std::string_view::npos) eol = csv.size();
        const std::string_view line = csv.substr(pos, eol - pos);
        pos = eol + 1;
        if (line.empty()) continue;
        if (!header_seen) {
            if (line != "position,mass") {
                throw ConfigurationError("CSV header must be 'position,mass'");
            }
            header_seen = true;
            continue;
        }
        const std::size_t comma = line.find(',');
        if (comma == std::string_view::npos) {
            throw ConfigurationError("CSV row missing comma: '" + std::string(line) + "'");
        }
        atoms.push_back(Atom{parse_double(line.substr(0, comma)),
                             parse_double(line.substr(comma + 1))});
    }
    if (!header_seen) throw ConfigurationError("CSV input has no header line");
    return PointConfiguration::from_sorted(std::move(atoms));
}

namespace {

nlohmann::json bound_to_json(double x) {
    if (x == kInf) return "inf";
    if (x == -kInf) return "-inf";
    return x;
}

double bound_from_json(const nlohmann::json& j) {
    if (j.is_string()) return parse_double(j.get<std::string>());
    return j.get<double>();
}

}  // namespace

nlohmann::json window_to_json(const Window& w) {
    return nlohmann::json::array({bound_to_json(w.lo), bound_to_json(w.hi)});
}

Window window_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != 2) {
        throw ConfigurationError("window JSON must be a [lo, hi] pair");
    }
    Window w{bound_from_json(j[0]), bound_from_json(j[1])};
    w.validate();
    return w;
}

nlohmann::json to_json(const PointConfiguration& cfg) {
    nlohmann::json atoms = nlohmann::json::array();
    for (const Atom& a : cfg.atoms()) {
        atoms.push_back(nlohmann::json::array({a.position, a.mass}));
    }
    nlohmann::json j;
    j["atoms"] = std::move(atoms);
    j["window"] = cfg.window() ? window_to_json(*cfg.window()) : nlohmann::json(nullptr);
    return j;
}

PointConfiguration config_from_json(const nlohmann::json& j) {
    std::vector<Atom> atoms;
    for (const auto& entry : j.at("atoms")) {
        if (!entry.is_array() || entry.size() != 2) {
            throw ConfigurationError("atom JSON must be a [position, mass] pair");
        }
        atoms.push_back(Atom{entry[0].get<double>(), entry[1].get<double>()});
    }
    std::optional<Window> window;
    if (j.contains("window") && !j["window"].is_null()) {
        window = window_from_json(j["window"]);
    }
    return PointConfiguration::from_sorted(std::move(atoms), window);
}

}  // namespace expstable
