#include "dkg/gateway/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <sstream>

#include "dkg/error.hpp"
#include "dkg/extraction/corpus.hpp"

namespace dkg::gateway {

namespace {

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

std::string number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v.size() || !std::isfinite(out)) throw Error(ErrorCode::InvalidConfig, key + ": not a number");
    return out;
}

std::uint64_t to_unsigned(const std::string& key, const std::string& v) {
    if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos) {
        throw Error(ErrorCode::InvalidConfig, key + ": not a nonnegative integer");
    }
    try {
        return std::stoull(v);
    } catch (const std::exception&) {
        throw Error(ErrorCode::InvalidConfig, key + ": out of range");
    }
}

using Setter = std::function<void(EngineConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter, std::less<>>& setters() {
    static const auto table = [] {
        std::map<std::string, Setter, std::less<>> t;
        for (const ParamId id : kAllParams) {
            t.emplace(std::string(param_name(id)),
                      [id](EngineConfig& c, const std::string& k, const std::string& v) { c.params.set(id, to_double(k, v)); });
        }
        t.emplace("max_edges", [](EngineConfig& c, const std::string& k, const std::string& v) { c.capacity.max_edges = to_unsigned(k, v); });
        t.emplace("batch_budget", [](EngineConfig& c, const std::string& k, const std::string& v) { c.capacity.batch_budget = to_unsigned(k, v); });
        t.emplace("mrf_smoothing", [](EngineConfig& c, const std::string& k, const std::string& v) { c.mrf_smoothing = to_double(k, v); });
        t.emplace("epsilon", [](EngineConfig& c, const std::string& k, const std::string& v) { c.epsilon = to_double(k, v); });
        t.emplace("diagnosis_threshold", [](EngineConfig& c, const std::string& k, const std::string& v) { c.diagnosis_threshold = to_double(k, v); });
        t.emplace("embedding_dim", [](EngineConfig& c, const std::string& k, const std::string& v) { c.embedding_dim = to_unsigned(k, v); });
        t.emplace("link_threshold", [](EngineConfig& c, const std::string& k, const std::string& v) { c.link_threshold = to_double(k, v); });
        t.emplace("seed", [](EngineConfig& c, const std::string& k, const std::string& v) { c.seed = to_unsigned(k, v); });
        t.emplace("data_dir", [](EngineConfig& c, const std::string&, const std::string& v) { c.data_dir = v; });
        t.emplace("extractor", [](EngineConfig& c, const std::string& k, const std::string& v) {
            if (v == "lexicon") c.extractor = ExtractorKind::Lexicon;
            else if (v == "remote") c.extractor = ExtractorKind::Remote;
            else throw Error(ErrorCode::InvalidConfig, k + ": expected lexicon or remote");
        });
        t.emplace("docs_per_batch", [](EngineConfig& c, const std::string& k, const std::string& v) { c.docs_per_batch = to_unsigned(k, v); });
        t.emplace("replay_capacity", [](EngineConfig& c, const std::string& k, const std::string& v) { c.replay_capacity = to_unsigned(k, v); });
        t.emplace("remote_host", [](EngineConfig& c, const std::string&, const std::string& v) { c.remote_host = v; });
        t.emplace("remote_port", [](EngineConfig& c, const std::string& k, const std::string& v) { c.remote_port = static_cast<int>(to_unsigned(k, v)); });
        t.emplace("remote_path", [](EngineConfig& c, const std::string&, const std::string& v) { c.remote_path = v; });
        t.emplace("remote_timeout_ms", [](EngineConfig& c, const std::string& k, const std::string& v) { c.remote_timeout_ms = static_cast<std::int64_t>(to_unsigned(k, v)); });
        t.emplace("remote_max_in_flight", [](EngineConfig& c, const std::string& k, const std::string& v) { c.remote_max_in_flight = to_unsigned(k, v); });
        t.emplace("remote_replay", [](EngineConfig& c, const std::string&, const std::string& v) { c.remote_replay = v; });
        return t;
    }();
    return table;
}

}  // namespace

std::string_view to_string(ExtractorKind k) noexcept { return k == ExtractorKind::Remote ? "remote" : "lexicon"; }

void EngineConfig::validate() const {
    params.validate();
    capacity.validate();
    auto require = [](bool ok, const char* what) {
        if (!ok) throw Error(ErrorCode::InvalidConfig, what);
    };
    require(mrf_smoothing > 0.0, "mrf_smoothing must be > 0");
    require(epsilon > 0.0 && epsilon < 1.0, "epsilon must lie in (0,1)");
    require(diagnosis_threshold >= 0.0 && diagnosis_threshold <= 1.0, "diagnosis_threshold must lie in [0,1]");
    require(embedding_dim > 0, "embedding_dim must be > 0");
    require(link_threshold >= 0.0 && link_threshold <= 1.0, "link_threshold must lie in [0,1]");
    require(!data_dir.empty(), "data_dir must not be empty");
    require(docs_per_batch > 0, "docs_per_batch must be > 0");
    require(replay_capacity > 0, "replay_capacity must be > 0");
    require(remote_port > 0 && remote_port < 65536, "remote_port must lie in 1..65535");
    require(remote_timeout_ms > 0, "remote_timeout_ms must be > 0");
    require(remote_max_in_flight > 0, "remote_max_in_flight must be > 0");
}

extraction::RemoteExtractorConfig EngineConfig::remote() const {
    extraction::RemoteExtractorConfig r;
    r.host = remote_host;
    r.port = remote_port;
    r.path = remote_path;
    r.timeout = std::chrono::milliseconds(remote_timeout_ms);
    r.max_in_flight = remote_max_in_flight;
    r.embedding_dim = embedding_dim;
    return r;
}

std::string EngineConfig::to_text() const {
    std::ostringstream out;
    out << "# engine configuration\n";
    for (const ParamId id : kAllParams) out << param_name(id) << " = " << number(params.get(id)) << "\n";
    out << "max_edges = " << capacity.max_edges << "\n"
        << "batch_budget = " << capacity.batch_budget << "\n"
        << "mrf_smoothing = " << number(mrf_smoothing) << "\n"
        << "epsilon = " << number(epsilon) << "\n"
        << "diagnosis_threshold = " << number(diagnosis_threshold) << "\n"
        << "embedding_dim = " << embedding_dim << "\n"
        << "link_threshold = " << number(link_threshold) << "\n"
        << "seed = " << seed << "\n"
        << "data_dir = " << data_dir.string() << "\n"
        << "extractor = " << to_string(extractor) << "\n"
        << "docs_per_batch = " << docs_per_batch << "\n"
        << "replay_capacity = " << replay_capacity << "\n"
        << "remote_host = " << remote_host << "\n"
        << "remote_port = " << remote_port << "\n"
        << "remote_path = " << remote_path << "\n"
        << "remote_timeout_ms = " << remote_timeout_ms << "\n"
        << "remote_max_in_flight = " << remote_max_in_flight << "\n"
        << "remote_replay = " << remote_replay << "\n";
    return out.str();
}

EngineConfig EngineConfig::parse(std::string_view text) {
    EngineConfig cfg;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto eq = body.find('=');
        const std::string where = "config line " + std::to_string(line_no) + ": ";
        if (eq == std::string::npos) throw Error(ErrorCode::InvalidConfig, where + "expected key = value");
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) throw Error(ErrorCode::InvalidConfig, where + "unknown key " + key);
        try {
            it->second(cfg, key, value);
        } catch (const Error& e) {
            throw Error(ErrorCode::InvalidConfig, where + e.what());
        }
    }
    cfg.validate();
    return cfg;
}

EngineConfig EngineConfig::load_file(const std::filesystem::path& path) {
    return parse(extraction::read_file(path));
}

void EngineConfig::apply_environment() {
    if (const char* dir = std::getenv(kDataDirEnv); dir != nullptr && *dir != '\0') data_dir = dir;
}

}  // namespace dkg::gateway
