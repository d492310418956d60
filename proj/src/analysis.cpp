#include "xling/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace xling {

namespace {

std::string fmt(const char* spec, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v);
    return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(trim(line.substr(start)));
            return fields;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
}

} // namespace

double pearson(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw std::invalid_argument("pearson: length mismatch: " + std::to_string(x.size()) + " vs " +
                                    std::to_string(y.size()));
    if (x.size() < 2)
        throw std::invalid_argument("pearson: need at least 2 points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw std::invalid_argument("pearson: undefined correlation (zero variance)");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::string pair_label(const LanguageTag& src, const LanguageTag& tgt) {
    return src.code() + "-" + tgt.code();
}

void ResultGrid::set(const std::string& method, const std::string& pair, Granularity gran,
                     const std::string& subcorpus, double f1, double weight) {
    if (!(f1 >= 0.0 && f1 <= 1.0))
        throw std::invalid_argument("grid F1 out of [0,1]: " + fmt("%.6g", f1));
    if (!(weight > 0.0))
        throw std::invalid_argument("grid weight must be positive");
    cells_[{method, pair, static_cast<int>(gran), subcorpus}] = Cell{f1, weight};
}

void ResultGrid::set_overall(const std::string& method, const std::string& pair, Granularity gran,
                             double f1) {
    if (!(f1 >= 0.0 && f1 <= 1.0))
        throw std::invalid_argument("grid F1 out of [0,1]: " + fmt("%.6g", f1));
    overalls_[{method, pair, static_cast<int>(gran)}] = f1;
}

std::optional<double> ResultGrid::overall(const std::string& method, const std::string& pair,
                                          Granularity gran) const {
    const auto ov = overalls_.find({method, pair, static_cast<int>(gran)});
    if (ov != overalls_.end()) return ov->second;
    double sum = 0.0, wsum = 0.0;
    const Key lo{method, pair, static_cast<int>(gran), ""};
    for (auto it = cells_.lower_bound(lo); it != cells_.end(); ++it) {
        const auto& [m, p, g, sub] = it->first;
        if (m != method || p != pair || g != static_cast<int>(gran)) break;
        const double w = use_weights_ ? it->second.weight : 1.0;
        sum += w * it->second.f1;
        wsum += w;
    }
    if (wsum == 0.0) return std::nullopt;
    return sum / wsum;
}

std::set<std::string> ResultGrid::methods(Granularity gran) const {
    std::set<std::string> out;
    for (const auto& [key, cell] : cells_)
        if (std::get<2>(key) == static_cast<int>(gran)) out.insert(std::get<0>(key));
    for (const auto& [key, f1] : overalls_)
        if (std::get<2>(key) == static_cast<int>(gran)) out.insert(std::get<0>(key));
    return out;
}

std::set<std::string> ResultGrid::pairs(Granularity gran) const {
    std::set<std::string> out;
    for (const auto& [key, cell] : cells_)
        if (std::get<2>(key) == static_cast<int>(gran)) out.insert(std::get<1>(key));
    for (const auto& [key, f1] : overalls_)
        if (std::get<2>(key) == static_cast<int>(gran)) out.insert(std::get<1>(key));
    return out;
}

std::set<Granularity> ResultGrid::granularities() const {
    std::set<Granularity> out;
    for (const auto& [key, cell] : cells_) out.insert(static_cast<Granularity>(std::get<2>(key)));
    for (const auto& [key, f1] : overalls_) out.insert(static_cast<Granularity>(std::get<2>(key)));
    return out;
}

std::set<std::string> ResultGrid::subcorpora(Granularity gran) const {
    std::set<std::string> out;
    for (const auto& [key, cell] : cells_)
        if (std::get<2>(key) == static_cast<int>(gran)) out.insert(std::get<3>(key));
    return out;
}

std::optional<double> ResultGrid::cell(const std::string& method, const std::string& pair,
                                       Granularity gran, const std::string& subcorpus) const {
    const auto it = cells_.find({method, pair, static_cast<int>(gran), subcorpus});
    if (it == cells_.end()) return std::nullopt;
    return it->second.f1;
}

namespace {

// Method-wise overall vector for one (pair, granularity); collects missing
// keys instead of failing one by one.
std::vector<double> overall_vector(const ResultGrid& grid, const std::set<std::string>& methods,
                                   const std::string& pair, Granularity gran,
                                   std::vector<std::string>& missing) {
    std::vector<double> v;
    v.reserve(methods.size());
    for (const std::string& m : methods) {
        const auto f1 = grid.overall(m, pair, gran);
        if (!f1)
            missing.push_back(m + "/" + pair + "/" + std::string(to_string(gran)));
        else
            v.push_back(*f1);
    }
    return v;
}

[[noreturn]] void throw_missing(const char* what, const std::vector<std::string>& missing) {
    std::string msg = std::string(what) + ": incomplete grid, missing:";
    for (const std::string& key : missing) msg += " " + key;
    throw std::invalid_argument(msg);
}

} // namespace

CorrelationReport correlate_language_pairs(const ResultGrid& grid, Granularity gran) {
    const std::set<std::string> methods = grid.methods(gran);
    const std::set<std::string> pairs = grid.pairs(gran);
    if (methods.size() < 2 || pairs.empty())
        throw std::invalid_argument("correlate_language_pairs: need at least 2 methods and 1 pair");

    std::vector<std::string> missing;
    std::vector<std::vector<double>> vectors;
    CorrelationReport report;
    for (const std::string& p : pairs) {
        report.labels.push_back(p);
        vectors.push_back(overall_vector(grid, methods, p, gran, missing));
    }
    if (!missing.empty()) throw_missing("correlate_language_pairs", missing);

    const std::size_t n = vectors.size();
    report.r.assign(n, std::vector<double>(n, 1.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            report.r[i][j] = report.r[j][i] = pearson(vectors[i], vectors[j]);
    report.mean_r.resize(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) sum += report.r[i][j];
        report.mean_r[i] = n > 1 ? sum / static_cast<double>(n - 1) : 0.0;
    }
    return report;
}

GranularityCorrelation correlate_granularities(const ResultGrid& grid) {
    const Granularity chunk = Granularity::Chunk, sentence = Granularity::Sentence;
    std::set<std::string> methods = grid.methods(chunk);
    for (const std::string& m : grid.methods(sentence)) methods.insert(m);
    std::set<std::string> pairs = grid.pairs(chunk);
    for (const std::string& p : grid.pairs(sentence)) pairs.insert(p);
    if (methods.size() < 2 || pairs.size() < 2)
        throw std::invalid_argument(
            "correlate_granularities: need at least 2 methods and 2 pairs at both granularities");

    std::vector<std::string> missing;
    GranularityCorrelation out;
    for (const std::string& p : pairs) {
        const std::vector<double> c = overall_vector(grid, methods, p, chunk, missing);
        const std::vector<double> s = overall_vector(grid, methods, p, sentence, missing);
        if (missing.empty()) out.by_pair[p] = pearson(c, s);
    }
    if (!missing.empty()) throw_missing("correlate_granularities", missing);

    for (const std::string& m : methods) {
        std::vector<double> c, s;
        for (const std::string& p : pairs) {
            c.push_back(*grid.overall(m, p, chunk));
            s.push_back(*grid.overall(m, p, sentence));
        }
        out.by_method[m] = pearson(c, s);
    }
    return out;
}

Ranking top_k_methods(const ResultGrid& grid, const std::string& pair, Granularity gran,
                      std::size_t k) {
    std::vector<std::pair<std::string, double>> scored;
    for (const std::string& m : grid.methods(gran)) {
        const auto f1 = grid.overall(m, pair, gran);
        if (f1) scored.emplace_back(m, *f1);
    }
    if (scored.empty())
        throw std::invalid_argument("top_k_methods: no methods for pair '" + pair + "' at " +
                                    std::string(to_string(gran)));
    std::sort(scored.begin(), scored.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    Ranking ranking;
    for (std::size_t i = 0; i + 1 < scored.size(); ++i)
        if (scored[i].second == scored[i + 1].second) ranking.has_tie = true;
    for (std::size_t i = 0; i < scored.size() && i < k; ++i)
        ranking.methods.push_back(scored[i].first);
    return ranking;
}

ResultGrid load_grid_csv(std::istream& in, const std::string& origin) {
    std::string header;
    if (!std::getline(in, header))
        throw std::runtime_error(origin + ": empty results file");
    const std::vector<std::string> cols = split_csv_line(header);
    const auto col = [&](const std::string& name) {
        const auto it = std::find(cols.begin(), cols.end(), name);
        if (it == cols.end())
            throw std::runtime_error(origin + ": missing column '" + name + "'");
        return static_cast<std::size_t>(it - cols.begin());
    };
    const std::size_t c_method = col("method"), c_src = col("src"), c_tgt = col("tgt"),
                      c_gran = col("granularity"), c_sub = col("subcorpus"), c_f1 = col("f1_mean");
    // pair count column is optional; without it the overall is unweighted
    std::size_t c_weight = cols.size();
    const auto wit = std::find(cols.begin(), cols.end(), "pairs");
    if (wit != cols.end()) c_weight = static_cast<std::size_t>(wit - cols.begin());

    ResultGrid grid;
    std::string line;
    std::size_t lineno = 1;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const std::vector<std::string> fields = split_csv_line(line);
        if (fields.size() < cols.size())
            throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": expected " +
                                     std::to_string(cols.size()) + " fields, got " +
                                     std::to_string(fields.size()));
        const auto num = [&](std::size_t idx) {
            char* end = nullptr;
            const double v = std::strtod(fields[idx].c_str(), &end);
            if (end != fields[idx].c_str() + fields[idx].size())
                throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                         ": malformed number in column '" + cols[idx] + "'");
            return v;
        };
        const std::string pair =
            pair_label(LanguageTag(fields[c_src]), LanguageTag(fields[c_tgt]));
        const Granularity gran = parse_granularity(fields[c_gran]);
        const double f1 = num(c_f1);
        if (fields[c_sub] == "Overall")
            grid.set_overall(fields[c_method], pair, gran, f1);
        else if (c_weight < cols.size())
            grid.set(fields[c_method], pair, gran, fields[c_sub], f1, num(c_weight));
        else
            grid.set(fields[c_method], pair, gran, fields[c_sub], f1);
        ++rows;
    }
    if (rows == 0)
        throw std::runtime_error(origin + ": no data rows");
    return grid;
}

ResultGrid load_grid_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open results file: " + path.string());
    return load_grid_csv(in, path.string());
}

std::string method_display_name(const std::string& id) {
    if (id == "c3g") return "CL-C3G";
    if (id == "cts") return "CL-CTS";
    if (id == "asa") return "CL-ASA";
    if (id == "esa") return "CL-ESA";
    if (id == "tma") return "T+MA";
    if (id == "len") return "Length Model";
    if (id == "rand") return "Random baseline";
    if (id == "oracle") return "Oracle";
    return id;
}

std::string correlation_matrix_csv(const CorrelationReport& report) {
    std::ostringstream csv;
    csv << "pair";
    for (const std::string& l : report.labels) csv << ',' << l;
    csv << ",overall\n";
    for (std::size_t i = 0; i < report.labels.size(); ++i) {
        csv << report.labels[i];
        for (std::size_t j = 0; j < report.labels.size(); ++j) csv << ',' << fmt("%.3f", report.r[i][j]);
        csv << ',' << fmt("%.3f", report.mean_r[i]) << '\n';
    }
    return csv.str();
}

std::string labelled_values_csv(std::string_view key_header,
                                const std::map<std::string, double>& values) {
    std::ostringstream csv;
    csv << key_header << ",correlation\n";
    for (const auto& [label, r] : values) csv << label << ',' << fmt("%.3f", r) << '\n';
    return csv.str();
}

namespace {

struct Rendering {
    std::filesystem::path name;
    std::string content;
};

void render_overall(const ResultGrid& grid, Granularity g, std::vector<Rendering>& out) {
    const std::set<std::string> methods = grid.methods(g);
    const std::set<std::string> pairs = grid.pairs(g);
    if (methods.empty() || pairs.empty()) return;

    std::ostringstream csv, md;
    csv << "method";
    md << "| Method |";
    for (const std::string& p : pairs) {
        csv << ',' << p;
        md << ' ' << p << " |";
    }
    csv << '\n';
    md << "\n|---|";
    for (std::size_t i = 0; i < pairs.size(); ++i) md << "---|";
    md << '\n';
    for (const std::string& m : methods) {
        csv << m;
        md << "| " << method_display_name(m) << " |";
        for (const std::string& p : pairs) {
            const auto f1 = grid.overall(m, p, g);
            csv << ',' << (f1 ? fmt("%.4f", *f1) : std::string());
            md << ' ' << (f1 ? fmt("%.4f", *f1) : std::string("-")) << " |";
        }
        csv << '\n';
        md << '\n';
    }
    const std::string stem = "overall_f1_" + std::string(to_string(g));
    out.push_back({stem + ".csv", csv.str()});
    out.push_back({stem + ".md", md.str()});
}

void render_pair_correlations(const ResultGrid& grid, Granularity g, std::vector<Rendering>& out) {
    CorrelationReport report;
    try {
        report = correlate_language_pairs(grid, g);
    } catch (const std::invalid_argument&) {
        return; // grid too small or incomplete for this analysis
    }
    std::ostringstream md;
    md << "| Pair |";
    for (const std::string& l : report.labels) md << ' ' << l << " |";
    md << " Overall |\n|---|";
    for (std::size_t i = 0; i <= report.labels.size(); ++i) md << "---|";
    md << '\n';
    for (std::size_t i = 0; i < report.labels.size(); ++i) {
        md << "| " << report.labels[i] << " |";
        for (std::size_t j = 0; j < report.labels.size(); ++j)
            md << ' ' << fmt("%.3f", report.r[i][j]) << " |";
        md << ' ' << fmt("%.3f", report.mean_r[i]) << " |\n";
    }
    const std::string stem = "corr_pairs_" + std::string(to_string(g));
    out.push_back({stem + ".csv", correlation_matrix_csv(report)});
    out.push_back({stem + ".md", md.str()});
}

void render_top3(const ResultGrid& grid, Granularity g, std::vector<Rendering>& out) {
    const std::set<std::string> pairs = grid.pairs(g);
    if (pairs.empty()) return;
    std::ostringstream csv, md;
    csv << "pair,rank,method\n";
    md << "| Pair | Top 1 | Top 2 | Top 3 |\n|---|---|---|---|\n";
    for (const std::string& p : pairs) {
        Ranking ranking;
        try {
            ranking = top_k_methods(grid, p, g, 3);
        } catch (const std::invalid_argument&) {
            continue;
        }
        md << "| " << p << " |";
        for (std::size_t i = 0; i < 3; ++i) {
            const std::string name = i < ranking.methods.size() ? ranking.methods[i] : "";
            if (!name.empty()) csv << p << ',' << i + 1 << ',' << name << '\n';
            md << ' ' << (name.empty() ? "-" : method_display_name(name)) << " |";
        }
        md << (ranking.has_tie ? " (tie)" : "") << '\n';
    }
    const std::string stem = "top3_" + std::string(to_string(g));
    out.push_back({stem + ".csv", csv.str()});
    out.push_back({stem + ".md", md.str()});
}

void render_granularity_correlations(const ResultGrid& grid, std::vector<Rendering>& out) {
    GranularityCorrelation gc;
    try {
        gc = correlate_granularities(grid);
    } catch (const std::invalid_argument&) {
        return;
    }
    {
        std::ostringstream md;
        md << "| Pair | Correlation |\n|---|---|\n";
        for (const auto& [p, r] : gc.by_pair) md << "| " << p << " | " << fmt("%.3f", r) << " |\n";
        out.push_back({"corr_granularities_by_pair.csv", labelled_values_csv("pair", gc.by_pair)});
        out.push_back({"corr_granularities_by_pair.md", md.str()});
    }
    {
        std::ostringstream md;
        md << "| Method | Correlation |\n|---|---|\n";
        for (const auto& [m, r] : gc.by_method)
            md << "| " << method_display_name(m) << " | " << fmt("%.3f", r) << " |\n";
        out.push_back(
            {"corr_granularities_by_method.csv", labelled_values_csv("method", gc.by_method)});
        out.push_back({"corr_granularities_by_method.md", md.str()});
    }
}

} // namespace

std::vector<std::filesystem::path> emit_reports(const ResultGrid& grid,
                                                const std::filesystem::path& out_dir) {
    if (grid.empty())
        throw std::invalid_argument("emit_reports: empty grid");

    std::vector<Rendering> renderings;
    for (Granularity g : grid.granularities()) {
        render_overall(grid, g, renderings);
        render_pair_correlations(grid, g, renderings);
        render_top3(grid, g, renderings);
    }
    render_granularity_correlations(grid, renderings);

    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;
    for (const Rendering& r : renderings) {
        const std::filesystem::path path = out_dir / r.name;
        std::ofstream f(path, std::ios::binary);
        if (!f)
            throw std::runtime_error("cannot write report: " + path.string());
        f << r.content;
        if (!f)
            throw std::runtime_error("write failed: " + path.string());
        written.push_back(path);
    }
    return written;
}

} // namespace xling
