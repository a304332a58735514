#pragma once

#include <string>
#include <vector>

#include "srl/net.hpp"

namespace srl {

// Regression samples (X_i, Y_i) on B^d x [-B, B].
class Dataset {
public:
    Dataset(int dim_input, std::vector<Point> xs, std::vector<double> ys, double label_bound);

    int dim_input() const noexcept { return dim_input_; }
    std::size_t size() const noexcept { return xs_.size(); }
    const std::vector<Point>& points() const noexcept { return xs_; }
    const std::vector<double>& labels() const noexcept { return ys_; }
    double label_bound() const noexcept { return label_bound_; }

private:
    int dim_input_;
    std::vector<Point> xs_;
    std::vector<double> ys_;
    double label_bound_;
};

// CSV with header "x1,...,xd,y", one row per sample. Doubles use
// shortest round-trip encoding on write.
Dataset load_dataset_csv(const std::string& path);
void save_dataset_csv(const Dataset& data, const std::string& path);

} // namespace srl
