#include "combofilter/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

namespace combofilter {

using nlohmann::json;

namespace {

std::vector<AlgorithmSpec> default_algorithms() {
    return {
        {"nsa_fast", AlgorithmKind::NsaFast, MixingRule::SignCost, Transfer::None},
        {"nsa_slow", AlgorithmKind::NsaSlow, MixingRule::SignCost, Transfer::None},
        {"nsa_nsa", AlgorithmKind::NsaNsa, MixingRule::SignCost, Transfer::Tracking},
        {"nsa_nsa_no_transfer", AlgorithmKind::NsaNsa, MixingRule::SignCost, Transfer::None},
        {"nsa_nsa_squared", AlgorithmKind::NsaNsa, MixingRule::SquaredCost, Transfer::Tracking},
        {"nlms_nsa", AlgorithmKind::NlmsNsa, MixingRule::SquaredCost, Transfer::None},
    };
}

ExperimentConfig example1() {
    ExperimentConfig cfg;
    cfg.trials = 50;
    cfg.horizon = 20000;
    cfg.steady_window = 2000;
    cfg.convergence_threshold_db = 3.0;
    cfg.tol_db = 1.0;
    cfg.scenario.num_taps = 10;
    cfg.scenario.input_variance = 1.0;
    cfg.scenario.noise = {0.01, 1e4 / 12.0, 10.0};
    cfg.scenario.change_at = 10000;
    cfg.scenario.change_kind = ChangeKind::SignFlip;
    cfg.rng.master_seed = 1;
    cfg.mu_fast = 0.05;
    cfg.mu_slow = 0.005;
    cfg.regularization = 1e-4;
    cfg.combiner = CombinerConfig{};
    cfg.algorithms = default_algorithms();
    return cfg;
}

ExperimentConfig example2() {
    ExperimentConfig cfg = example1();
    cfg.scenario.noise = {0.01, 1e4 / 20.0, 5.0};
    cfg.mu_slow = 0.008;
    return cfg;
}

template <typename Enum>
struct EnumName {
    Enum value;
    const char* name;
};

constexpr EnumName<AlgorithmKind> kAlgorithmKinds[] = {
    {AlgorithmKind::NsaFast, "nsa_fast"},
    {AlgorithmKind::NsaSlow, "nsa_slow"},
    {AlgorithmKind::NsaNsa, "nsa_nsa"},
    {AlgorithmKind::NlmsNsa, "nlms_nsa"},
};
constexpr EnumName<MixingRule> kMixingRules[] = {
    {MixingRule::SignCost, "sign"},
    {MixingRule::SquaredCost, "squared"},
};
constexpr EnumName<Transfer> kTransfers[] = {
    {Transfer::None, "none"},
    {Transfer::Tracking, "tracking"},
};
constexpr EnumName<ChangeKind> kChangeKinds[] = {
    {ChangeKind::SignFlip, "sign_flip"},
    {ChangeKind::Redraw, "redraw"},
};

template <typename Enum, std::size_t N>
std::string enum_name(const EnumName<Enum> (&table)[N], Enum value) {
    for (const auto& entry : table) {
        if (entry.value == value) {
            return entry.name;
        }
    }
    return "unknown";
}

template <typename Enum, std::size_t N>
Enum enum_value(const EnumName<Enum> (&table)[N], const json& node, const std::string& path) {
    if (!node.is_string()) {
        throw ConfigError(path, "expected a string");
    }
    const auto text = node.get<std::string>();
    std::string allowed;
    for (const auto& entry : table) {
        if (text == entry.name) {
            return entry.value;
        }
        allowed += allowed.empty() ? "" : ", ";
        allowed += entry.name;
    }
    throw ConfigError(path, "unknown value '" + text + "' (expected one of: " + allowed + ")");
}

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

void require_object(const json& node, const std::string& path) {
    if (!node.is_object()) {
        throw ConfigError(path, "expected an object");
    }
}

void reject_unknown(const json& node, const std::string& path,
                    std::initializer_list<const char*> known) {
    for (const auto& item : node.items()) {
        bool found = false;
        for (const char* k : known) {
            found = found || item.key() == k;
        }
        if (!found) {
            throw ConfigError(join(path, item.key()), "unknown key");
        }
    }
}

double as_double(const json& node, const std::string& path) {
    if (node.is_number()) {
        return node.get<double>();
    }
    if (node.is_string()) {
        const auto text = node.get<std::string>();
        if (text == "inf" || text == "+inf") return std::numeric_limits<double>::infinity();
        if (text == "-inf") return -std::numeric_limits<double>::infinity();
    }
    throw ConfigError(path, "expected a number");
}

std::uint64_t as_unsigned(const json& node, const std::string& path) {
    if (!node.is_number_unsigned()) {
        throw ConfigError(path, "expected a non-negative integer");
    }
    return node.get<std::uint64_t>();
}

void read_double(const json& obj, const char* key, const std::string& path, double& out) {
    if (auto it = obj.find(key); it != obj.end()) {
        out = as_double(*it, join(path, key));
    }
}

template <typename Int>
void read_unsigned(const json& obj, const char* key, const std::string& path, Int& out) {
    if (auto it = obj.find(key); it != obj.end()) {
        out = static_cast<Int>(as_unsigned(*it, join(path, key)));
    }
}

json number_or_inf(double value) {
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    return value;
}

void read_scenario(const json& node, ScenarioConfig& sc) {
    const std::string path = "scenario";
    require_object(node, path);
    reject_unknown(node, path,
                   {"num_taps", "input_variance", "snr_db", "impulse_probability",
                    "impulse_variance", "change_at", "change_kind"});
    read_unsigned(node, "num_taps", path, sc.num_taps);
    read_double(node, "input_variance", path, sc.input_variance);
    read_double(node, "snr_db", path, sc.noise.snr_db);
    read_double(node, "impulse_probability", path, sc.noise.impulse_probability);
    read_double(node, "impulse_variance", path, sc.noise.impulse_variance);
    if (auto it = node.find("change_at"); it != node.end()) {
        if (it->is_null()) {
            sc.change_at.reset();
        } else {
            sc.change_at = as_unsigned(*it, join(path, "change_at"));
        }
    }
    if (auto it = node.find("change_kind"); it != node.end()) {
        sc.change_kind = enum_value(kChangeKinds, *it, join(path, "change_kind"));
    }
}

void read_filters(const json& node, ExperimentConfig& cfg) {
    const std::string path = "filters";
    require_object(node, path);
    reject_unknown(node, path, {"mu_fast", "mu_slow", "regularization"});
    read_double(node, "mu_fast", path, cfg.mu_fast);
    read_double(node, "mu_slow", path, cfg.mu_slow);
    read_double(node, "regularization", path, cfg.regularization);
}

void read_combiner(const json& node, CombinerConfig& comb) {
    const std::string path = "combiner";
    require_object(node, path);
    reject_unknown(node, path, {"rho_a", "nu_a", "a_plus", "window_length", "eps_u"});
    read_double(node, "rho_a", path, comb.rho_a);
    read_double(node, "nu_a", path, comb.nu_a);
    read_double(node, "a_plus", path, comb.a_plus);
    read_unsigned(node, "window_length", path, comb.window_length);
    read_double(node, "eps_u", path, comb.eps_u);
}

std::vector<AlgorithmSpec> read_algorithms(const json& node) {
    if (!node.is_array()) {
        throw ConfigError("algorithms", "expected an array");
    }
    std::vector<AlgorithmSpec> out;
    for (std::size_t i = 0; i < node.size(); ++i) {
        const std::string path = "algorithms[" + std::to_string(i) + "]";
        const auto& item = node[i];
        require_object(item, path);
        reject_unknown(item, path, {"name", "kind", "mixing_rule", "transfer"});
        AlgorithmSpec spec;
        auto kind = item.find("kind");
        if (kind == item.end()) {
            throw ConfigError(join(path, "kind"), "missing");
        }
        spec.kind = enum_value(kAlgorithmKinds, *kind, join(path, "kind"));
        spec.name = enum_name(kAlgorithmKinds, spec.kind);
        if (spec.kind == AlgorithmKind::NlmsNsa) {
            spec.mixing_rule = MixingRule::SquaredCost;
            spec.transfer = Transfer::None;
        }
        if (auto it = item.find("name"); it != item.end()) {
            if (!it->is_string()) {
                throw ConfigError(join(path, "name"), "expected a string");
            }
            spec.name = it->get<std::string>();
        }
        if (auto it = item.find("mixing_rule"); it != item.end()) {
            spec.mixing_rule = enum_value(kMixingRules, *it, join(path, "mixing_rule"));
        }
        if (auto it = item.find("transfer"); it != item.end()) {
            spec.transfer = enum_value(kTransfers, *it, join(path, "transfer"));
        }
        out.push_back(std::move(spec));
    }
    return out;
}

ExperimentConfig config_from_json(const json& root) {
    require_object(root, "");
    reject_unknown(root, "",
                   {"preset", "trials", "horizon", "steady_window", "convergence_threshold_db",
                    "tol_db", "seed", "scenario", "filters", "combiner", "algorithms"});

    ExperimentConfig cfg;
    if (auto it = root.find("preset"); it != root.end()) {
        if (!it->is_string()) {
            throw ConfigError("preset", "expected a string");
        }
        cfg = preset(it->get<std::string>());
    } else {
        cfg = preset("example1");
    }

    read_unsigned(root, "trials", "", cfg.trials);
    read_unsigned(root, "horizon", "", cfg.horizon);
    if (root.contains("steady_window")) {
        read_unsigned(root, "steady_window", "", cfg.steady_window);
    } else if (root.contains("horizon")) {
        cfg.steady_window = std::max<std::size_t>(1, cfg.horizon / 10);
    }
    read_double(root, "convergence_threshold_db", "", cfg.convergence_threshold_db);
    read_double(root, "tol_db", "", cfg.tol_db);
    read_unsigned(root, "seed", "", cfg.rng.master_seed);
    if (auto it = root.find("scenario"); it != root.end()) read_scenario(*it, cfg.scenario);
    if (auto it = root.find("filters"); it != root.end()) read_filters(*it, cfg);
    if (auto it = root.find("combiner"); it != root.end()) read_combiner(*it, cfg.combiner);
    if (auto it = root.find("algorithms"); it != root.end()) cfg.algorithms = read_algorithms(*it);

    validate(cfg);
    return cfg;
}

json config_json(const ExperimentConfig& cfg) {
    json algorithms = json::array();
    for (const auto& spec : cfg.algorithms) {
        algorithms.push_back({{"name", spec.name},
                              {"kind", to_string(spec.kind)},
                              {"mixing_rule", to_string(spec.mixing_rule)},
                              {"transfer", to_string(spec.transfer)}});
    }
    const auto& sc = cfg.scenario;
    json scenario = {
        {"num_taps", sc.num_taps},
        {"input_variance", number_or_inf(sc.input_variance)},
        {"snr_db", number_or_inf(sc.noise.snr_db)},
        {"impulse_probability", sc.noise.impulse_probability},
        {"impulse_variance", number_or_inf(sc.noise.impulse_variance)},
        {"change_at", sc.change_at ? json(*sc.change_at) : json(nullptr)},
        {"change_kind", to_string(sc.change_kind)},
    };
    return {
        {"trials", cfg.trials},
        {"horizon", cfg.horizon},
        {"steady_window", cfg.steady_window},
        {"convergence_threshold_db", cfg.convergence_threshold_db},
        {"tol_db", cfg.tol_db},
        {"seed", cfg.rng.master_seed},
        {"scenario", scenario},
        {"filters",
         {{"mu_fast", cfg.mu_fast}, {"mu_slow", cfg.mu_slow}, {"regularization", cfg.regularization}}},
        {"combiner",
         {{"rho_a", cfg.combiner.rho_a},
          {"nu_a", cfg.combiner.nu_a},
          {"a_plus", cfg.combiner.a_plus},
          {"window_length", cfg.combiner.window_length},
          {"eps_u", cfg.combiner.eps_u}}},
        {"algorithms", algorithms},
    };
}

}  // namespace

std::vector<std::string> preset_names() { return {"example1", "example2"}; }

ExperimentConfig preset(std::string_view name) {
    if (name == "example1") return example1();
    if (name == "example2") return example2();
    throw ConfigError("preset", "unknown preset '" + std::string(name) +
                                    "' (expected example1 or example2)");
}

ExperimentConfig parse_config(std::string_view text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& err) {
        throw ConfigError("", err.what());
    }
    if (root.is_object() && root.contains("format_version")) {
        const auto& version = root["format_version"];
        if (!version.is_string() || version.get<std::string>() != kManifestVersion) {
            throw ConfigError("format_version", "unsupported manifest version");
        }
        if (!root.contains("config")) {
            throw ConfigError("config", "manifest has no config section");
        }
        return config_from_json(root["config"]);
    }
    return config_from_json(root);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("", "cannot read config file '" + path.string() + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str());
}

std::string config_to_json(const ExperimentConfig& config) {
    return config_json(config).dump(2) + "\n";
}

std::string manifest_to_json(const RunManifest& manifest) {
    json root = {
        {"format_version", kManifestVersion},
        {"command", manifest.command},
        {"source", manifest.source},
        {"output_dir", manifest.output_dir},
        {"config", config_json(manifest.config)},
    };
    return root.dump(2) + "\n";
}

std::string to_string(AlgorithmKind kind) { return enum_name(kAlgorithmKinds, kind); }
std::string to_string(MixingRule rule) { return enum_name(kMixingRules, rule); }
std::string to_string(Transfer transfer) { return enum_name(kTransfers, transfer); }
std::string to_string(ChangeKind kind) { return enum_name(kChangeKinds, kind); }

}  // namespace combofilter
