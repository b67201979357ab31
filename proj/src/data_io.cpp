#include "gclust/data_io.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "gclust/rng.hpp"

namespace fs = std::filesystem;

namespace gclust {

namespace {

[[noreturn]] void fail_at(const std::string& file, int line_no, const std::string& what) {
    throw std::runtime_error(file + ":" + std::to_string(line_no) + ": " + what);
}

// Strips a trailing carriage return so CRLF files load cleanly.
void chomp(std::string& line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
}

double parse_double(const std::string& cell, const std::string& file, int line_no) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    errno = 0;
    const double value = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || errno == ERANGE)
        fail_at(file, line_no, "not a number: '" + cell + "'");
    return value;
}

long parse_int(const std::string& cell, const std::string& file, int line_no) {
    const char* begin = cell.c_str();
    char* end = nullptr;
    errno = 0;
    const long value = std::strtol(begin, &end, 10);
    if (end == begin || *end != '\0' || errno == ERANGE)
        fail_at(file, line_no, "not an integer: '" + cell + "'");
    return value;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(sep, start);
        if (pos == std::string::npos) {
            cells.push_back(line.substr(start));
            return cells;
        }
        cells.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::ifstream open_or_throw(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return in;
}

std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string format_fixed(double v, int decimals) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string format_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

const char* kMetricColumns[] = {"conductance", "modularity", "nmi",  "f1",
                                "aicd",        "micd",       "aicv", "silhouette"};

std::vector<double> metric_values(const ResultRow& r) {
    return {r.metrics.conductance, r.metrics.modularity_q, r.metrics.nmi, r.metrics.f1,
            r.diversity.aicd,      r.diversity.micd,       r.diversity.aicv,
            r.diversity.silhouette};
}

}  // namespace

Dataset load_dataset(const std::string& dir) {
    const fs::path base(dir);
    Dataset ds;
    ds.name = base.filename().string();
    if (ds.name.empty()) ds.name = base.parent_path().filename().string();

    // features.tsv defines n and F.
    const fs::path feat_path = base / "features.tsv";
    {
        std::ifstream in = open_or_throw(feat_path);
        std::vector<std::vector<double>> rows;
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            chomp(line);
            if (line.empty()) fail_at(feat_path.string(), line_no, "empty line");
            const std::vector<std::string> cells = split(line, '\t');
            std::vector<double> row;
            row.reserve(cells.size());
            for (const std::string& cell : cells)
                row.push_back(parse_double(cell, feat_path.string(), line_no));
            if (!rows.empty() && rows.front().size() != row.size())
                fail_at(feat_path.string(), line_no,
                        "feature row length " + std::to_string(row.size()) + " != " +
                            std::to_string(rows.front().size()));
            rows.push_back(std::move(row));
        }
        if (rows.empty()) throw std::runtime_error(feat_path.string() + ": no feature rows");
        ds.features = Matrix(static_cast<int>(rows.size()), static_cast<int>(rows.front().size()));
        for (int v = 0; v < ds.features.rows; ++v)
            std::copy(rows[v].begin(), rows[v].end(), ds.features[v]);
    }
    const int n = ds.features.rows;

    // edges.tsv: "u<TAB>v" per line.
    const fs::path edge_path = base / "edges.tsv";
    {
        std::ifstream in = open_or_throw(edge_path);
        std::vector<std::pair<int, int>> edges;
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            chomp(line);
            if (line.empty()) fail_at(edge_path.string(), line_no, "empty line");
            const std::vector<std::string> cells = split(line, '\t');
            if (cells.size() != 2)
                fail_at(edge_path.string(), line_no, "expected 'u<TAB>v'");
            const long u = parse_int(cells[0], edge_path.string(), line_no);
            const long v = parse_int(cells[1], edge_path.string(), line_no);
            if (u < 0 || u >= n || v < 0 || v >= n)
                fail_at(edge_path.string(), line_no,
                        "node id outside [0," + std::to_string(n) + ")");
            edges.emplace_back(static_cast<int>(u), static_cast<int>(v));
        }
        ds.graph = build_graph(n, edges);
    }

    // labels.tsv is optional; arbitrary non-negative ids are remapped to dense
    // ids ordered by value.
    const fs::path label_path = base / "labels.tsv";
    if (fs::exists(label_path)) {
        std::ifstream in = open_or_throw(label_path);
        std::vector<long> raw;
        std::string line;
        int line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            chomp(line);
            if (line.empty()) fail_at(label_path.string(), line_no, "empty line");
            const long id = parse_int(line, label_path.string(), line_no);
            if (id < 0) fail_at(label_path.string(), line_no, "negative class id");
            raw.push_back(id);
        }
        if (static_cast<int>(raw.size()) != n)
            throw std::runtime_error(label_path.string() + ": " + std::to_string(raw.size()) +
                                     " labels for " + std::to_string(n) + " nodes");
        std::vector<long> uniq(raw);
        std::sort(uniq.begin(), uniq.end());
        uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
        std::map<long, int> dense;
        for (std::size_t i = 0; i < uniq.size(); ++i) dense[uniq[i]] = static_cast<int>(i);
        ds.labels.reserve(raw.size());
        for (long id : raw) ds.labels.push_back(dense[id]);
    }
    return ds;
}

void save_dataset(const Dataset& ds, const std::string& dir) {
    const fs::path base(dir);
    std::error_code ec;
    fs::create_directories(base, ec);

    {
        std::ofstream out(base / "features.tsv");
        if (!out) throw std::runtime_error("cannot write " + (base / "features.tsv").string());
        for (int v = 0; v < ds.features.rows; ++v) {
            const double* row = ds.features[v];
            for (int j = 0; j < ds.features.cols; ++j) {
                if (j > 0) out << '\t';
                out << format_full(row[j]);
            }
            out << '\n';
        }
    }
    {
        std::ofstream out(base / "edges.tsv");
        if (!out) throw std::runtime_error("cannot write " + (base / "edges.tsv").string());
        // One line per undirected edge: the u < v orientation.
        const SparseGraph& g = ds.graph;
        for (int u = 0; u < g.n; ++u)
            for (int idx = g.row_offsets[u]; idx < g.row_offsets[u + 1]; ++idx)
                if (u < g.col_indices[idx]) out << u << '\t' << g.col_indices[idx] << '\n';
    }
    if (ds.has_labels()) {
        std::ofstream out(base / "labels.tsv");
        if (!out) throw std::runtime_error("cannot write " + (base / "labels.tsv").string());
        for (int id : ds.labels) out << id << '\n';
    }
}

Dataset generate_sbm(const SbmSpec& spec) {
    if (spec.block_sizes.empty()) throw std::invalid_argument("generate_sbm: no blocks");
    for (int s : spec.block_sizes)
        if (s < 1) throw std::invalid_argument("generate_sbm: block sizes must be >= 1");
    if (!(spec.p_out >= 0.0 && spec.p_out <= spec.p_in && spec.p_in <= 1.0))
        throw std::invalid_argument("generate_sbm: need 0 <= p_out <= p_in <= 1");
    if (spec.feature_dim < 1) throw std::invalid_argument("generate_sbm: feature_dim must be >= 1");
    if (spec.noise_sd < 0.0) throw std::invalid_argument("generate_sbm: negative noise_sd");

    Dataset ds;
    ds.name = "sbm";
    int n = 0;
    for (int s : spec.block_sizes) n += s;
    ds.labels.reserve(n);
    for (std::size_t b = 0; b < spec.block_sizes.size(); ++b)
        ds.labels.insert(ds.labels.end(), spec.block_sizes[b], static_cast<int>(b));

    std::mt19937_64 eng(spec.seed);

    // One uniform per unordered pair, in fixed (u,v) order.
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
            const double p = ds.labels[u] == ds.labels[v] ? spec.p_in : spec.p_out;
            if (next_uniform(eng) < p) edges.emplace_back(u, v);
        }
    }
    ds.graph = build_graph(n, edges);

    // Block means sit mean_sep along axis (block mod F); noise drawn row-major.
    ds.features = Matrix(n, spec.feature_dim);
    for (int v = 0; v < n; ++v) {
        double* row = ds.features[v];
        for (int j = 0; j < spec.feature_dim; ++j) row[j] = spec.noise_sd * next_gaussian(eng);
        row[ds.labels[v] % spec.feature_dim] += spec.mean_sep;
    }
    return ds;
}

int ResultsTable::column_index(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    return it == columns.end() ? -1 : static_cast<int>(it - columns.begin());
}

std::vector<double> ResultsTable::column_as_doubles(const std::string& name) const {
    const int idx = column_index(name);
    if (idx < 0) throw std::runtime_error("results table has no column '" + name + "'");
    std::vector<double> out;
    out.reserve(rows.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
        out.push_back(parse_double(rows[r][idx], "column " + name, static_cast<int>(r) + 2));
    return out;
}

ResultsTable read_results_csv(const std::string& path) {
    std::ifstream in = open_or_throw(path);
    ResultsTable table;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        chomp(line);
        if (line.empty()) continue;
        std::vector<std::string> cells = split(line, ',');
        if (line_no == 1) {
            table.columns = std::move(cells);
            continue;
        }
        if (cells.size() != table.columns.size())
            fail_at(path, line_no, "row has " + std::to_string(cells.size()) + " cells, header has " +
                                       std::to_string(table.columns.size()));
        table.rows.push_back(std::move(cells));
    }
    if (table.columns.empty()) throw std::runtime_error(path + ": empty file");
    return table;
}

void write_results_csv(const std::vector<ResultRow>& rows, const std::string& path) {
    if (rows.empty()) throw std::invalid_argument("write_results_csv: no rows");
    const fs::path main_path(path);
    fs::path full_path(main_path);
    full_path.replace_extension(".full.csv");
    fs::path summary_path(main_path);
    summary_path.replace_extension(".summary.csv");
    if (main_path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(main_path.parent_path(), ec);
    }

    const std::string header =
        "seed,method,conductance,modularity,nmi,f1,aicd,micd,aicv,silhouette,"
        "k,epochs,lr,hidden,w_dist,w_var,w_entropy,epsilon,delta";

    auto write_rows = [&](const fs::path& p, bool full_precision) {
        std::ofstream out(p);
        if (!out) throw std::runtime_error("cannot write " + p.string());
        out << header << '\n';
        for (const ResultRow& r : rows) {
            out << r.seed << ',' << r.method;
            for (double v : metric_values(r))
                out << ',' << (full_precision ? format_full(v) : format_fixed(v, 2));
            out << ',' << r.k << ',' << r.epochs << ',' << format_short(r.lr) << ',' << r.hidden
                << ',' << format_short(r.loss.w_dist) << ',' << format_short(r.loss.w_var) << ','
                << format_short(r.loss.w_ent) << ',' << format_short(r.loss.epsilon) << ','
                << format_short(r.loss.delta) << '\n';
        }
    };
    write_rows(main_path, false);
    write_rows(full_path, true);

    // Column-wise mean and sample standard deviation over the runs.
    std::ofstream out(summary_path);
    if (!out) throw std::runtime_error("cannot write " + summary_path.string());
    out << "stat";
    for (const char* name : kMetricColumns) out << ',' << name;
    out << '\n';
    const std::size_t cols = std::size(kMetricColumns);
    std::vector<double> mean(cols, 0.0), sd(cols, 0.0);
    for (const ResultRow& r : rows) {
        const std::vector<double> vals = metric_values(r);
        for (std::size_t j = 0; j < cols; ++j) mean[j] += vals[j];
    }
    for (std::size_t j = 0; j < cols; ++j) mean[j] /= static_cast<double>(rows.size());
    if (rows.size() > 1) {
        for (const ResultRow& r : rows) {
            const std::vector<double> vals = metric_values(r);
            for (std::size_t j = 0; j < cols; ++j)
                sd[j] += (vals[j] - mean[j]) * (vals[j] - mean[j]);
        }
        for (std::size_t j = 0; j < cols; ++j)
            sd[j] = std::sqrt(sd[j] / static_cast<double>(rows.size() - 1));
    }
    out << "mean";
    for (std::size_t j = 0; j < cols; ++j) out << ',' << format_full(mean[j]);
    out << "\nstd";
    for (std::size_t j = 0; j < cols; ++j) out << ',' << format_full(sd[j]);
    out << '\n';
}

}  // namespace gclust
