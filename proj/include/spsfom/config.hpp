#pragma once

// Plain-text key=value configuration for the CLI. Unknown keys are hard
// errors so typos cannot silently fall back to defaults. Exactly one of
// {cavity.purcell (with cavity.Q), cavity.g_GHz + cavity.kappa_GHz} selects
// the cavity parametrization.
//
// Recognized keys:
//   emitter.gammaR_ns        radiative lifetime (ns)
//   emitter.gammaNR_GHz      intrinsic non-radiative rate (ordinary GHz)
//   emitter.gammaStar_GHz    pure dephasing (ordinary GHz)
//   emitter.omega_THz        optical resonance (ordinary THz)
//   cavity.Q                 quality factor
//   cavity.purcell           R/gamma_r
//   cavity.g_GHz             coupling (ordinary GHz)
//   cavity.kappa_GHz         linewidth (ordinary GHz)
//   cavity.etaR              radiative fraction
//   quench.DeltaQ_THz        effective detuning (ordinary THz)
//   quench.DeltaQCombined_THz  Delta_q (1-etaR)^{-1/2}; gamma_q = g^2 kappa/D^2
//   quench.modes             semicolon list of k:Delta_GHz pairs
//   psb.sample               none | sample3 | sample5 | file:<path>
//   method                   full | simplified | oracle
//   sweep.x.quantity  sweep.x.scale  sweep.x.min  sweep.x.max  sweep.x.points
//   sweep.y.*                same as sweep.x.*
//   sweep.bareDecayRatio     overrides the emitter bare decay as
//                            (gamma_r+gamma_nr)/gamma* for reduced sweeps
//   sweep.outputs            comma list: beta,indist,product,regimeFlags,
//                            validityFlags,errEstimate (default: all but errEstimate)

#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spsfom/io_util.hpp"
#include "spsfom/markovian.hpp"
#include "spsfom/params.hpp"
#include "spsfom/psb.hpp"
#include "spsfom/sweep.hpp"
#include "spsfom/units.hpp"

namespace spsfom::config {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct KeyValues {
    std::map<std::string, std::string> entries;
    std::string rawText;

    bool has(const std::string& key) const { return entries.count(key) != 0; }

    const std::string& get(const std::string& key) const {
        auto it = entries.find(key);
        if (it == entries.end()) throw ConfigError("missing required key '" + key + "'");
        return it->second;
    }

    double getDouble(const std::string& key) const {
        const std::string& raw = get(key);
        try {
            std::size_t pos = 0;
            const double v = std::stod(raw, &pos);
            while (pos < raw.size() && std::isspace(static_cast<unsigned char>(raw[pos]))) ++pos;
            if (pos != raw.size()) throw std::invalid_argument(raw);
            return v;
        } catch (const std::exception&) {
            throw ConfigError("key '" + key + "': cannot parse number from '" + raw + "'");
        }
    }

    int getInt(const std::string& key) const {
        const double v = getDouble(key);
        const int i = static_cast<int>(v);
        if (static_cast<double>(i) != v)
            throw ConfigError("key '" + key + "': expected an integer, got '" + get(key) + "'");
        return i;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline const std::set<std::string>& knownKeys() {
    static const std::set<std::string> keys = {
        "emitter.gammaR_ns", "emitter.gammaNR_GHz", "emitter.gammaStar_GHz", "emitter.omega_THz",
        "cavity.Q", "cavity.purcell", "cavity.g_GHz", "cavity.kappa_GHz", "cavity.etaR",
        "quench.DeltaQ_THz", "quench.DeltaQCombined_THz", "quench.modes",
        "psb.sample", "method",
        "sweep.x.quantity", "sweep.x.scale", "sweep.x.min", "sweep.x.max", "sweep.x.points",
        "sweep.y.quantity", "sweep.y.scale", "sweep.y.min", "sweep.y.max", "sweep.y.points",
        "sweep.bareDecayRatio", "sweep.outputs",
    };
    return keys;
}

} // namespace detail

inline KeyValues parseConfigText(const std::string& text) {
    KeyValues kv;
    kv.rawText = text;
    std::istringstream is(text);
    std::string line;
    int lineNo = 0;
    std::vector<std::string> problems;
    while (std::getline(is, line)) {
        ++lineNo;
        const std::string stripped = detail::trim(line);
        if (stripped.empty() || stripped[0] == '#') continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            problems.push_back("line " + std::to_string(lineNo) + ": expected key=value, got '" +
                               stripped + "'");
            continue;
        }
        const std::string key = detail::trim(stripped.substr(0, eq));
        const std::string value = detail::trim(stripped.substr(eq + 1));
        if (!detail::knownKeys().count(key)) {
            problems.push_back("line " + std::to_string(lineNo) + ": unknown key '" + key + "'");
            continue;
        }
        if (kv.entries.count(key))
            problems.push_back("line " + std::to_string(lineNo) + ": duplicate key '" + key + "'");
        kv.entries[key] = value;
    }
    if (!problems.empty()) {
        std::string msg = "config errors:";
        for (const auto& p : problems) msg += "\n  " + p;
        throw ConfigError(msg);
    }
    return kv;
}

inline KeyValues parseConfigFile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parseConfigText(buf.str());
}

enum class PsbSource { None, Sample3, Sample5, File };

struct System {
    EmitterParams emitter;
    CavityParams cavity{Rate(0.0), Rate(1.0), 1.0};
    QuenchModel quench;
    PsbSource psbSource = PsbSource::None;
    std::optional<psb::PsbSpectrum> spectrum;
    markov::Method method = markov::Method::FullPerturbative;
    std::uint64_t configHash = 0;
};

inline markov::Method parseMethod(const std::string& name) {
    if (name == "full") return markov::Method::FullPerturbative;
    if (name == "simplified") return markov::Method::SimplifiedEq5;
    if (name == "oracle") return markov::Method::NumericOracle;
    throw ConfigError("method must be full, simplified or oracle, got '" + name + "'");
}

inline QuenchModel parseQuenchModes(const std::string& text) {
    std::vector<QuenchModel::Mode> modes;
    std::istringstream is(text);
    std::string item;
    while (std::getline(is, item, ';')) {
        item = detail::trim(item);
        if (item.empty()) continue;
        const auto colon = item.find(':');
        if (colon == std::string::npos)
            throw ConfigError("quench.modes entries must be k:Delta_GHz, got '" + item + "'");
        try {
            const double k = std::stod(item.substr(0, colon));
            const double deltaGHz = std::stod(item.substr(colon + 1));
            modes.push_back({k, Rate::fromFrequencyGHz(deltaGHz)});
        } catch (const std::exception&) {
            throw ConfigError("quench.modes: cannot parse '" + item + "'");
        }
    }
    if (modes.empty()) throw ConfigError("quench.modes: no modes given");
    return QuenchModel::perMode(std::move(modes));
}

inline System buildSystem(const KeyValues& kv) {
    System sys;
    sys.configHash = io::fnv1a(kv.rawText);

    sys.emitter.gammaR = Rate::fromLifetimeNs(kv.getDouble("emitter.gammaR_ns"));
    sys.emitter.gammaNR =
        kv.has("emitter.gammaNR_GHz") ? Rate::fromFrequencyGHz(kv.getDouble("emitter.gammaNR_GHz"))
                                      : Rate(0.0);
    sys.emitter.gammaStar = Rate::fromFrequencyGHz(kv.getDouble("emitter.gammaStar_GHz"));
    sys.emitter.omega0 = Rate::fromFrequencyTHz(kv.getDouble("emitter.omega_THz"));

    const double etaR = kv.has("cavity.etaR") ? kv.getDouble("cavity.etaR") : 1.0;
    const bool hasPurcell = kv.has("cavity.purcell");
    const bool hasG = kv.has("cavity.g_GHz");
    const bool hasKappa = kv.has("cavity.kappa_GHz");
    if (hasPurcell == (hasG && hasKappa))
        throw ConfigError(
            "exactly one of {cavity.purcell (+cavity.Q), cavity.g_GHz+cavity.kappa_GHz} must be given");
    if (hasG != hasKappa)
        throw ConfigError("cavity.g_GHz and cavity.kappa_GHz must be given together");
    if (hasPurcell) {
        if (!kv.has("cavity.Q")) throw ConfigError("cavity.purcell requires cavity.Q");
        sys.cavity = CavityParams::fromPurcell(kv.getDouble("cavity.purcell"), sys.emitter.gammaR,
                                               sys.emitter.omega0, kv.getDouble("cavity.Q"), etaR);
    } else {
        sys.cavity = CavityParams{Rate::fromFrequencyGHz(kv.getDouble("cavity.g_GHz")),
                                  Rate::fromFrequencyGHz(kv.getDouble("cavity.kappa_GHz")), etaR};
    }

    const int quenchForms = (kv.has("quench.DeltaQ_THz") ? 1 : 0) +
                            (kv.has("quench.DeltaQCombined_THz") ? 1 : 0) +
                            (kv.has("quench.modes") ? 1 : 0);
    if (quenchForms > 1)
        throw ConfigError(
            "give at most one of quench.DeltaQ_THz, quench.DeltaQCombined_THz, quench.modes");
    if (kv.has("quench.DeltaQ_THz")) {
        sys.quench =
            QuenchModel::effectiveDetuning(Rate::fromFrequencyTHz(kv.getDouble("quench.DeltaQ_THz")));
    } else if (kv.has("quench.DeltaQCombined_THz")) {
        if (!(etaR < 1.0))
            throw ConfigError("quench.DeltaQCombined_THz requires cavity.etaR < 1");
        const Rate combined = Rate::fromFrequencyTHz(kv.getDouble("quench.DeltaQCombined_THz"));
        sys.quench = QuenchModel::effectiveDetuning(Rate(combined.value() * std::sqrt(1.0 - etaR)));
    } else if (kv.has("quench.modes")) {
        sys.quench = parseQuenchModes(kv.get("quench.modes"));
    }

    const std::string psbSample = kv.has("psb.sample") ? kv.get("psb.sample") : "none";
    if (psbSample == "none") {
        sys.psbSource = PsbSource::None;
    } else if (psbSample == "sample3") {
        sys.psbSource = PsbSource::Sample3;
        sys.spectrum = psb::builtinSpectrum(psb::Sample::Sample3);
    } else if (psbSample == "sample5") {
        sys.psbSource = PsbSource::Sample5;
        sys.spectrum = psb::builtinSpectrum(psb::Sample::Sample5);
    } else if (psbSample.rfind("file:", 0) == 0) {
        sys.psbSource = PsbSource::File;
        std::ifstream in(psbSample.substr(5));
        if (!in) throw ConfigError("psb.sample: cannot open '" + psbSample.substr(5) + "'");
        sys.spectrum = psb::readSpectrumCsv(in);
    } else {
        throw ConfigError("psb.sample must be none, sample3, sample5 or file:<path>");
    }

    if (kv.has("method")) sys.method = parseMethod(kv.get("method"));

    const auto report = validateParams(sys.emitter, sys.cavity);
    if (!report.valid()) {
        std::string msg = "parameter validation failed:";
        for (const auto& v : report.violations) msg += "\n  " + v;
        throw ConfigError(msg);
    }
    return sys;
}

inline sweep::AxisQuantity parseAxisQuantity(const std::string& name) {
    using sweep::AxisQuantity;
    if (name == "R_over_gammaStar") return AxisQuantity::ROverGammaStar;
    if (name == "kappa_over_gammaStar") return AxisQuantity::KappaOverGammaStar;
    if (name == "Q") return AxisQuantity::QualityFactor;
    if (name == "DeltaQ_over_gammaStar") return AxisQuantity::DeltaQOverGammaStar;
    if (name == "R_over_gammaR") return AxisQuantity::ROverGammaR;
    throw ConfigError("unknown axis quantity '" + name + "'");
}

inline sweep::AxisSpec parseAxis(const KeyValues& kv, const std::string& prefix) {
    sweep::AxisSpec axis;
    axis.quantity = parseAxisQuantity(kv.get(prefix + ".quantity"));
    const std::string scale = kv.has(prefix + ".scale") ? kv.get(prefix + ".scale") : "log";
    if (scale == "log") axis.logScale = true;
    else if (scale == "linear") axis.logScale = false;
    else throw ConfigError(prefix + ".scale must be log or linear");
    axis.min = kv.getDouble(prefix + ".min");
    axis.max = kv.getDouble(prefix + ".max");
    axis.points = kv.getInt(prefix + ".points");
    return axis;
}

inline sweep::SweepSpec buildSweepSpec(const KeyValues& kv, const System& sys) {
    if (!kv.has("sweep.x.quantity") || !kv.has("sweep.y.quantity"))
        throw ConfigError("sweep requires sweep.x.* and sweep.y.* axis blocks");
    sweep::SweepSpec spec;
    spec.x = parseAxis(kv, "sweep.x");
    spec.y = parseAxis(kv, "sweep.y");
    spec.fixed.emitter = sys.emitter;
    spec.fixed.cavity = sys.cavity;
    spec.fixed.quench = sys.quench;
    spec.fixed.spectrum = sys.spectrum;
    spec.fixed.method = sys.method;
    if (kv.has("sweep.bareDecayRatio")) {
        const double ratio = kv.getDouble("sweep.bareDecayRatio");
        if (!(ratio >= 0.0)) throw ConfigError("sweep.bareDecayRatio must be >= 0");
        spec.fixed.emitter.gammaR = Rate(ratio * sys.emitter.gammaStar.value());
        spec.fixed.emitter.gammaNR = Rate(0.0);
    }
    if (kv.has("sweep.outputs")) {
        sweep::Outputs out{false, false, false, false, false, false};
        std::istringstream is(kv.get("sweep.outputs"));
        std::string item;
        while (std::getline(is, item, ',')) {
            item = detail::trim(item);
            if (item == "beta") out.beta = true;
            else if (item == "indist") out.indist = true;
            else if (item == "product") out.product = true;
            else if (item == "regimeFlags") out.regimeFlags = true;
            else if (item == "validityFlags") out.validityFlags = true;
            else if (item == "errEstimate") out.errEstimate = true;
            else throw ConfigError("sweep.outputs: unknown output '" + item + "'");
        }
        spec.outputs = out;
    }
    sweep::validateSpec(spec);
    return spec;
}

} // namespace spsfom::config
