#include "srl/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "srl/common.hpp"

namespace srl {

namespace {

std::string format_double(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return {buf, ptr};
}

double parse_double(const std::string& field, std::size_t line_no) {
    double v = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end) {
        throw ConfigError("csv: malformed number '" + field + "' at line " +
                          std::to_string(line_no));
    }
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream iss(line);
    while (std::getline(iss, field, ',')) out.push_back(field);
    return out;
}

} // namespace

Dataset::Dataset(int dim_input, std::vector<Point> xs, std::vector<double> ys, double label_bound)
    : dim_input_(dim_input), xs_(std::move(xs)), ys_(std::move(ys)), label_bound_(label_bound) {
    if (dim_input_ < 1) throw ConfigError("Dataset: dim_input must be >= 1");
    if (xs_.empty()) throw ConfigError("Dataset: needs at least one sample");
    if (xs_.size() != ys_.size()) throw ConfigError("Dataset: point/label count mismatch");
    if (!(label_bound_ > 0.0) || !std::isfinite(label_bound_))
        throw ConfigError("Dataset: label bound must be positive and finite");
    for (const Point& p : xs_) {
        if (p.coords.size() != static_cast<std::size_t>(dim_input_))
            throw ConfigError("Dataset: point dimension mismatch");
        if (euclidean_norm(p.coords) > 1.0 + 1e-12)
            throw ConfigError("Dataset: point outside the unit ball");
    }
    for (double y : ys_) {
        if (!std::isfinite(y) || std::abs(y) > label_bound_ * (1.0 + 1e-12))
            throw ConfigError("Dataset: label exceeds the label bound");
    }
}

Dataset load_dataset_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("csv: cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("csv: empty file '" + path + "'");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_csv_line(line);
    if (header.size() < 2 || header.back() != "y")
        throw ConfigError("csv: expected header x1,...,xd,y in '" + path + "'");
    const int d = static_cast<int>(header.size()) - 1;

    std::vector<Point> xs;
    std::vector<double> ys;
    double max_abs_y = 0.0;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size())
            throw ConfigError("csv: wrong field count at line " + std::to_string(line_no));
        Point p;
        p.coords.reserve(d);
        for (int i = 0; i < d; ++i) p.coords.push_back(parse_double(fields[i], line_no));
        const double y = parse_double(fields.back(), line_no);
        max_abs_y = std::max(max_abs_y, std::abs(y));
        xs.push_back(std::move(p));
        ys.push_back(y);
    }
    if (xs.empty()) throw ConfigError("csv: no data rows in '" + path + "'");
    const double bound = max_abs_y > 0.0 ? max_abs_y : 1.0;
    return {d, std::move(xs), std::move(ys), bound};
}

void save_dataset_csv(const Dataset& data, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("csv: cannot write '" + path + "'");
    for (int i = 1; i <= data.dim_input(); ++i) out << 'x' << i << ',';
    out << "y\n";
    for (std::size_t r = 0; r < data.size(); ++r) {
        for (double c : data.points()[r].coords) out << format_double(c) << ',';
        out << format_double(data.labels()[r]) << '\n';
    }
}

} // namespace srl
