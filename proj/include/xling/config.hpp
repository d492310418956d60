#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "xling/corpus.hpp"
#include "xling/lexres.hpp"

namespace xling {

// Per-method block from the run config. Resource keys are
// "<kind>.<src>-<tgt>" (lexicon.en-fr, table.en-fr, stats.en-fr,
// concepts.en-fr); values are paths already resolved to absolute.
struct MethodConfig {
    std::string id;
    std::map<std::string, std::filesystem::path> resources;
    std::size_t tma_top_k = kKeepAllTargets;

    const std::filesystem::path* resource(const std::string& kind, const std::string& pair) const {
        const auto it = resources.find(kind + "." + pair);
        return it == resources.end() ? nullptr : &it->second;
    }
};

// Declarative run description. Everything is checked up front: referenced
// files must exist, bounds must hold, unknown keys are errors.
//
//   [run]
//   m = 1000
//   folds = 10
//   seed = 42
//   out = results
//   pairs = en-fr, fr-en          # optional filter
//   granularities = sentence      # optional filter
//   pairs_per_corpus = 200        # fingerprint sampling size
//
//   [corpora]
//   manifest = jrc.enfr.sentence.manifest
//
//   [method.c3g]
//   [method.cts]
//   lexicon.en-fr = lex/en-fr.tsv
//
// Relative manifest/resource paths resolve against dataset_root, which
// defaults to $XLINGSIM_DATA or, failing that, the config file's directory.
struct RunConfig {
    std::filesystem::path config_path;
    std::filesystem::path dataset_root;
    std::vector<std::filesystem::path> manifests;
    std::set<std::string> pair_filter;       // labels like "en-fr"; empty = all
    std::set<Granularity> gran_filter;       // empty = all
    std::vector<MethodConfig> methods;
    std::size_t m = 1000;
    int folds = 10;
    std::uint64_t seed = 0;
    std::filesystem::path out_dir = "results";
    std::size_t pairs_per_corpus = 200;
};

RunConfig load_run_config(const std::filesystem::path& path);

} // namespace xling
