#include "lticlust/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "lticlust/errors.hpp"

namespace lticlust {

namespace {

std::string num17(double v)
{
    if (std::isnan(v))
        return "nan";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string num4(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot write " + path.string());
    out << text;
    if (!out)
        throw IoError("write failed for " + path.string());
}

double parse_double(const std::string& s)
{
    if (s == "nan" || s == "-nan")
        return std::numeric_limits<double>::quiet_NaN();
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size())
        throw std::invalid_argument(s);
    return v;
}

}  // namespace

std::string format_csv(const std::vector<ResultRow>& rows)
{
    std::ostringstream os;
    os << kCsvHeader << '\n';
    for (const auto& r : rows) {
        os << r.trial << ',' << r.K << ',' << r.N << ',' << r.T << ',' << r.L1 << ',' << r.L2 << ','
           << num17(r.width) << ',' << num17(r.clustering_accuracy) << ','
           << num17(r.avg_markov_error) << ',' << num17(r.avg_realization_error) << ','
           << num17(r.kmeans_sse) << ',' << num17(r.min_sv_U) << ',' << num17(r.runtime_ms) << ','
           << r.error_flag << '\n';
    }
    return os.str();
}

void emit_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path)
{
    if (rows.empty())
        throw IoError("refusing to write an empty result table");
    write_file(path, format_csv(rows));
}

std::vector<ResultRow> parse_csv(const std::string& text)
{
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader)
        throw IoError("unexpected CSV header");
    std::vector<ResultRow> rows;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        std::vector<std::string> f;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ','))
            f.push_back(cell);
        if (f.size() != 14)
            throw IoError("CSV line " + std::to_string(lineno) + " has " +
                          std::to_string(f.size()) + " fields");
        try {
            ResultRow r;
            r.trial = std::stoi(f[0]);
            r.K = std::stoi(f[1]);
            r.N = std::stoi(f[2]);
            r.T = std::stol(f[3]);
            r.L1 = std::stol(f[4]);
            r.L2 = std::stol(f[5]);
            r.width = parse_double(f[6]);
            r.clustering_accuracy = parse_double(f[7]);
            r.avg_markov_error = parse_double(f[8]);
            r.avg_realization_error = parse_double(f[9]);
            r.kmeans_sse = parse_double(f[10]);
            r.min_sv_U = parse_double(f[11]);
            r.runtime_ms = parse_double(f[12]);
            r.error_flag = std::stoi(f[13]);
            rows.push_back(r);
        } catch (const std::exception&) {
            throw IoError("CSV line " + std::to_string(lineno) + " is malformed");
        }
    }
    return rows;
}

std::vector<ResultRow> read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str());
}

double quantile(std::vector<double> values, double q)
{
    std::erase_if(values, [](double v) { return std::isnan(v); });
    if (values.empty())
        return std::numeric_limits<double>::quiet_NaN();
    std::sort(values.begin(), values.end());
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

std::vector<CellSummary> summarize(const std::vector<ResultRow>& rows)
{
    using Key = std::tuple<double, int, Index>;
    std::map<Key, std::vector<const ResultRow*>> cells;
    for (const auto& r : rows)
        cells[{r.width, r.N, r.T}].push_back(&r);

    std::vector<CellSummary> out;
    for (const auto& [key, members] : cells) {
        CellSummary s;
        std::tie(s.width, s.N, s.T) = key;
        std::vector<double> err, acc;
        for (const ResultRow* r : members) {
            ++s.trials;
            if (r->error_flag) {
                ++s.failures;
                continue;
            }
            err.push_back(r->avg_markov_error);
            acc.push_back(r->clustering_accuracy);
        }
        s.median_error = quantile(err, 0.5);
        s.q25_error = quantile(err, 0.25);
        s.q75_error = quantile(err, 0.75);
        s.median_accuracy = quantile(acc, 0.5);
        out.push_back(s);
    }
    return out;
}

namespace {

constexpr std::array<const char*, 8> kPalette = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                                 "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

struct Frame {
    double left = 70, right = 140, top = 40, bottom = 60;
    double width = 680, height = 440;
    double plot_w() const { return width - left - right; }
    double plot_h() const { return height - top - bottom; }
};

std::string svg_open(const Frame& f, const std::string& title)
{
    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f.width << "\" height=\""
       << f.height << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
       << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
       << "<text x=\"" << f.width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
       << title << "</text>\n";
    return os.str();
}

std::string line_chart(const std::vector<CellSummary>& cells, double width)
{
    std::set<Index> Ts;
    std::set<int> Ns;
    double ymin = std::numeric_limits<double>::infinity(), ymax = 0.0;
    for (const auto& c : cells) {
        Ts.insert(c.T);
        Ns.insert(c.N);
        for (double v : {c.q25_error, c.q75_error, c.median_error})
            if (std::isfinite(v) && v > 0) {
                ymin = std::min(ymin, v);
                ymax = std::max(ymax, v);
            }
    }
    if (!std::isfinite(ymin)) {
        ymin = 1e-3;
        ymax = 1.0;
    }
    const double lo = std::floor(std::log10(ymin)), hi = std::max(std::ceil(std::log10(ymax)), lo + 1);
    const double xlo = std::log2(static_cast<double>(*Ts.begin()));
    const double xhi = std::max(std::log2(static_cast<double>(*Ts.rbegin())), xlo + 1);

    Frame f;
    auto X = [&](Index T) {
        return f.left + (std::log2(static_cast<double>(T)) - xlo) / (xhi - xlo) * f.plot_w();
    };
    auto Y = [&](double v) { return f.top + (hi - std::log10(v)) / (hi - lo) * f.plot_h(); };

    std::ostringstream os;
    os << svg_open(f, "Average Markov error vs T (width " + num4(width) + ")");
    os << "<rect x=\"" << f.left << "\" y=\"" << f.top << "\" width=\"" << f.plot_w()
       << "\" height=\"" << f.plot_h() << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double e = lo; e <= hi; e += 1.0) {
        const double y = Y(std::pow(10.0, e));
        os << "<line x1=\"" << f.left << "\" x2=\"" << f.left + f.plot_w() << "\" y1=\"" << y
           << "\" y2=\"" << y << "\" stroke=\"#ddd\"/>\n"
           << "<text x=\"" << f.left - 6 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">1e"
           << static_cast<int>(e) << "</text>\n";
    }
    for (Index T : Ts)
        os << "<text x=\"" << X(T) << "\" y=\"" << f.top + f.plot_h() + 18
           << "\" text-anchor=\"middle\">" << T << "</text>\n";
    os << "<text x=\"" << f.left + f.plot_w() / 2 << "\" y=\"" << f.height - 15
       << "\" text-anchor=\"middle\">trajectory length T</text>\n"
       << "<text transform=\"translate(18," << f.top + f.plot_h() / 2
       << ") rotate(-90)\" text-anchor=\"middle\">median error (25-75% band)</text>\n";

    std::size_t color = 0;
    for (int N : Ns) {
        const char* col = kPalette[color++ % kPalette.size()];
        std::vector<const CellSummary*> curve;
        for (const auto& c : cells)
            if (c.N == N && std::isfinite(c.median_error) && c.median_error > 0)
                curve.push_back(&c);
        if (curve.empty())
            continue;
        std::sort(curve.begin(), curve.end(),
                  [](const CellSummary* a, const CellSummary* b) { return a->T < b->T; });
        os << "<polygon fill=\"" << col << "\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
        for (const auto* c : curve)
            os << X(c->T) << ',' << Y(std::max(c->q75_error, 1e-300)) << ' ';
        for (auto it = curve.rbegin(); it != curve.rend(); ++it)
            os << X((*it)->T) << ',' << Y(std::max((*it)->q25_error, 1e-300)) << ' ';
        os << "\"/>\n<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"2\" points=\"";
        for (const auto* c : curve)
            os << X(c->T) << ',' << Y(c->median_error) << ' ';
        os << "\"/>\n";
        for (const auto* c : curve)
            os << "<circle cx=\"" << X(c->T) << "\" cy=\"" << Y(c->median_error)
               << "\" r=\"3\" fill=\"" << col << "\"/>\n";
        const double ly = f.top + 16.0 * static_cast<double>(color);
        os << "<line x1=\"" << f.width - f.right + 15 << "\" x2=\"" << f.width - f.right + 35
           << "\" y1=\"" << ly << "\" y2=\"" << ly << "\" stroke=\"" << col
           << "\" stroke-width=\"2\"/>\n<text x=\"" << f.width - f.right + 40 << "\" y=\""
           << ly + 4 << "\">N = " << N << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::string heat_color(double t)
{
    // Piecewise-linear approximation of viridis.
    static constexpr std::array<std::array<double, 3>, 5> stops = {{{68, 1, 84},
                                                                    {59, 82, 139},
                                                                    {33, 145, 140},
                                                                    {94, 201, 98},
                                                                    {253, 231, 37}}};
    t = std::clamp(t, 0.0, 1.0) * (stops.size() - 1);
    const auto i = std::min<std::size_t>(static_cast<std::size_t>(t), stops.size() - 2);
    const double a = t - static_cast<double>(i);
    char buf[16];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                  static_cast<int>(stops[i][0] + a * (stops[i + 1][0] - stops[i][0])),
                  static_cast<int>(stops[i][1] + a * (stops[i + 1][1] - stops[i][1])),
                  static_cast<int>(stops[i][2] + a * (stops[i + 1][2] - stops[i][2])));
    return buf;
}

std::string heatmap(const std::vector<CellSummary>& cells, double width)
{
    std::set<Index> Ts;
    std::set<int> Ns;
    double lmin = std::numeric_limits<double>::infinity(), lmax = -lmin;
    for (const auto& c : cells) {
        Ts.insert(c.T);
        Ns.insert(c.N);
        if (std::isfinite(c.median_error) && c.median_error > 0) {
            lmin = std::min(lmin, std::log10(c.median_error));
            lmax = std::max(lmax, std::log10(c.median_error));
        }
    }
    if (!(lmax > lmin))
        lmax = lmin + 1.0;

    Frame f;
    f.right = 40;
    const double cw = f.plot_w() / static_cast<double>(Ts.size());
    const double ch = f.plot_h() / static_cast<double>(Ns.size());
    std::map<Index, std::size_t> col_of;
    std::map<int, std::size_t> row_of;
    for (Index T : Ts)
        col_of.emplace(T, col_of.size());
    for (auto it = Ns.rbegin(); it != Ns.rend(); ++it)
        row_of.emplace(*it, row_of.size());

    std::ostringstream os;
    os << svg_open(f, "Median Markov error over (N, T) (width " + num4(width) + ")");
    for (const auto& c : cells) {
        const double x = f.left + cw * static_cast<double>(col_of[c.T]);
        const double y = f.top + ch * static_cast<double>(row_of[c.N]);
        const bool ok = std::isfinite(c.median_error) && c.median_error > 0;
        const double t = ok ? (std::log10(c.median_error) - lmin) / (lmax - lmin) : 0.0;
        os << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cw << "\" height=\"" << ch
           << "\" fill=\"" << (ok ? heat_color(1.0 - t) : std::string("#cccccc"))
           << "\" stroke=\"white\"/>\n"
           << "<text x=\"" << x + cw / 2 << "\" y=\"" << y + ch / 2 + 4
           << "\" text-anchor=\"middle\" fill=\"" << (t > 0.6 ? "white" : "black") << "\">"
           << (ok ? num4(c.median_error) : std::string("n/a")) << "</text>\n";
    }
    for (const auto& [T, col] : col_of)
        os << "<text x=\"" << f.left + cw * (static_cast<double>(col) + 0.5) << "\" y=\""
           << f.top + f.plot_h() + 18 << "\" text-anchor=\"middle\">" << T << "</text>\n";
    for (const auto& [N, row] : row_of)
        os << "<text x=\"" << f.left - 8 << "\" y=\"" << f.top + ch * (static_cast<double>(row) + 0.5) + 4
           << "\" text-anchor=\"end\">" << N << "</text>\n";
    os << "<text x=\"" << f.left + f.plot_w() / 2 << "\" y=\"" << f.height - 15
       << "\" text-anchor=\"middle\">trajectory length T</text>\n"
       << "<text transform=\"translate(18," << f.top + f.plot_h() / 2
       << ") rotate(-90)\" text-anchor=\"middle\">trajectories per cluster N</text>\n"
       << "</svg>\n";
    return os.str();
}

}  // namespace

std::vector<std::filesystem::path> emit_plots(const std::vector<ResultRow>& rows,
                                              const std::filesystem::path& dir)
{
    if (rows.empty())
        throw IoError("refusing to plot an empty result table");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
        throw IoError("cannot create " + dir.string() + ": " + ec.message());

    const auto cells = summarize(rows);
    std::vector<std::filesystem::path> written;

    std::ostringstream summary;
    summary << "width,N,T,trials,failure_rate,median_error,q25_error,q75_error,median_accuracy\n";
    for (const auto& c : cells)
        summary << num17(c.width) << ',' << c.N << ',' << c.T << ',' << c.trials << ','
                << num17(static_cast<double>(c.failures) / c.trials) << ',' << num17(c.median_error)
                << ',' << num17(c.q25_error) << ',' << num17(c.q75_error) << ','
                << num17(c.median_accuracy) << '\n';
    written.push_back(dir / "summary.csv");
    write_file(written.back(), summary.str());

    std::vector<double> widths;
    for (const auto& c : cells)
        if (widths.empty() || widths.back() != c.width)
            widths.push_back(c.width);
    for (std::size_t w = 0; w < widths.size(); ++w) {
        std::vector<CellSummary> subset;
        for (const auto& c : cells)
            if (c.width == widths[w])
                subset.push_back(c);
        written.push_back(dir / ("error_vs_T_w" + std::to_string(w) + ".svg"));
        write_file(written.back(), line_chart(subset, widths[w]));
        written.push_back(dir / ("error_heatmap_w" + std::to_string(w) + ".svg"));
        write_file(written.back(), heatmap(subset, widths[w]));
    }
    return written;
}

}  // namespace lticlust
