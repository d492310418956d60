#include "xling/config.hpp"

#include <cstdlib>
#include <fstream>
#include <stdexcept>

namespace xling {

namespace {

struct IniEntry {
    std::string key;
    std::string value;
    std::size_t line;
};

struct IniSection {
    std::string name;
    std::size_t line;
    std::vector<IniEntry> entries;
};

std::vector<IniSection> parse_ini(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("cannot open config: " + path.string());
    std::vector<IniSection> sections;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) +
                                            ": malformed section header");
            sections.push_back({trim(t.substr(1, t.size() - 2)), lineno, {}});
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) +
                                        ": expected 'key = value'");
        if (sections.empty())
            throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) +
                                        ": key outside any section");
        sections.back().entries.push_back({trim(t.substr(0, eq)), trim(t.substr(eq + 1)), lineno});
    }
    return sections;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t comma = s.find(',', start);
        const std::string item =
            trim(comma == std::string::npos ? s.substr(start) : s.substr(start, comma - start));
        if (!item.empty()) out.push_back(item);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

std::uint64_t parse_u64(const std::string& where, const std::string& value) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
    if (value.empty() || end != value.c_str() + value.size())
        throw std::invalid_argument(where + ": malformed integer '" + value + "'");
    return v;
}

// "en-fr" -> validated lowercase pair label
std::string parse_pair_label(const std::string& where, const std::string& s) {
    const std::size_t dash = s.find('-');
    if (dash == std::string::npos)
        throw std::invalid_argument(where + ": expected a pair like 'en-fr', got '" + s + "'");
    const LanguageTag a(s.substr(0, dash));
    const LanguageTag b(s.substr(dash + 1));
    if (a == b)
        throw std::invalid_argument(where + ": pair must use two distinct languages: '" + s + "'");
    return a.code() + "-" + b.code();
}

bool method_known(const std::string& id) {
    static const std::set<std::string> ids = {"c3g", "cts", "asa", "esa", "tma",
                                              "len", "rand", "oracle"};
    return ids.count(id) > 0;
}

// Resource kinds each method may declare.
bool resource_kind_allowed(const std::string& method, const std::string& kind) {
    if (method == "cts") return kind == "lexicon";
    if (method == "tma") return kind == "lexicon" || kind == "table";
    if (method == "asa") return kind == "table" || kind == "stats";
    if (method == "len") return kind == "stats";
    if (method == "esa") return kind == "concepts";
    return false; // c3g, rand, oracle need no resources
}

} // namespace

RunConfig load_run_config(const std::filesystem::path& path) {
    RunConfig config;
    config.config_path = std::filesystem::absolute(path);
    const std::filesystem::path config_dir = config.config_path.parent_path();

    if (const char* env = std::getenv("XLINGSIM_DATA"); env && *env)
        config.dataset_root = env;
    else
        config.dataset_root = config_dir;

    const std::vector<IniSection> sections = parse_ini(path);
    const auto where = [&](std::size_t line) { return path.string() + ":" + std::to_string(line); };

    // Paths resolve against dataset_root, which may be declared anywhere in
    // the file, so collect first and resolve afterwards.
    std::vector<std::pair<std::string, std::size_t>> pending_manifests;
    struct PendingResource {
        std::size_t method_index;
        std::string key;
        std::string value;
        std::size_t line;
    };
    std::vector<PendingResource> pending_resources;

    for (const IniSection& section : sections) {
        if (section.name == "run") {
            for (const IniEntry& e : section.entries) {
                if (e.key == "dataset_root") {
                    std::filesystem::path p(e.value);
                    config.dataset_root = p.is_absolute() ? p : config_dir / p;
                } else if (e.key == "m") {
                    config.m = parse_u64(where(e.line), e.value);
                } else if (e.key == "folds") {
                    config.folds = static_cast<int>(parse_u64(where(e.line), e.value));
                } else if (e.key == "seed") {
                    config.seed = parse_u64(where(e.line), e.value);
                } else if (e.key == "out") {
                    config.out_dir = e.value;
                } else if (e.key == "pairs") {
                    for (const std::string& p : split_list(e.value))
                        config.pair_filter.insert(parse_pair_label(where(e.line), p));
                } else if (e.key == "granularities") {
                    for (const std::string& g : split_list(e.value))
                        config.gran_filter.insert(parse_granularity(g));
                } else if (e.key == "pairs_per_corpus") {
                    config.pairs_per_corpus = parse_u64(where(e.line), e.value);
                } else {
                    throw std::invalid_argument(where(e.line) + ": unknown [run] key '" + e.key + "'");
                }
            }
        } else if (section.name == "corpora") {
            for (const IniEntry& e : section.entries) {
                if (e.key != "manifest")
                    throw std::invalid_argument(where(e.line) + ": unknown [corpora] key '" + e.key +
                                                "'");
                pending_manifests.emplace_back(e.value, e.line);
            }
        } else if (section.name.rfind("method.", 0) == 0) {
            MethodConfig method;
            method.id = section.name.substr(7);
            if (!method_known(method.id))
                throw std::invalid_argument(where(section.line) + ": unknown method '" + method.id +
                                            "'");
            for (const IniEntry& e : section.entries) {
                if (method.id == "tma" && e.key == "top_k") {
                    method.tma_top_k = parse_u64(where(e.line), e.value);
                    if (method.tma_top_k < 1)
                        throw std::invalid_argument(where(e.line) + ": top_k must be >= 1");
                    continue;
                }
                const std::size_t dot = e.key.find('.');
                if (dot == std::string::npos)
                    throw std::invalid_argument(where(e.line) + ": unknown method key '" + e.key + "'");
                const std::string kind = e.key.substr(0, dot);
                const std::string pair = parse_pair_label(where(e.line), e.key.substr(dot + 1));
                if (!resource_kind_allowed(method.id, kind))
                    throw std::invalid_argument(where(e.line) + ": method '" + method.id +
                                                "' does not take resource kind '" + kind + "'");
                pending_resources.push_back(
                    {config.methods.size(), kind + "." + pair, e.value, e.line});
            }
            for (const MethodConfig& existing : config.methods)
                if (existing.id == method.id)
                    throw std::invalid_argument(where(section.line) + ": duplicate method section '" +
                                                method.id + "'");
            config.methods.push_back(std::move(method));
        } else {
            throw std::invalid_argument(where(section.line) + ": unknown section '" + section.name +
                                        "'");
        }
    }
    for (const auto& [value, line] : pending_manifests) {
        std::filesystem::path p(value);
        if (!p.is_absolute()) p = config.dataset_root / p;
        if (!std::filesystem::exists(p))
            throw std::invalid_argument(where(line) + ": manifest does not exist: " + p.string());
        config.manifests.push_back(p);
    }
    for (const PendingResource& r : pending_resources) {
        std::filesystem::path p(r.value);
        if (!p.is_absolute()) p = config.dataset_root / p;
        if (!std::filesystem::exists(p))
            throw std::invalid_argument(where(r.line) + ": resource file does not exist: " + p.string());
        config.methods[r.method_index].resources[r.key] = p;
    }

    if (config.m < 1)
        throw std::invalid_argument(path.string() + ": m must be >= 1");
    if (config.folds < 1)
        throw std::invalid_argument(path.string() + ": folds must be >= 1");
    if (config.pairs_per_corpus < 1)
        throw std::invalid_argument(path.string() + ": pairs_per_corpus must be >= 1");
    if (config.manifests.empty())
        throw std::invalid_argument(path.string() + ": no corpora manifests configured");
    if (config.methods.empty())
        throw std::invalid_argument(path.string() + ": no methods configured");
    return config;
}

} // namespace xling
