#pragma once

#include <Eigen/Dense>

#include "weakiv/errors.hpp"

namespace weakiv {

/// Observed sample for one-dimensional IV regression: response `y`, scalar
/// endogenous regressor `x`, and an n-by-K instrument matrix `z` whose rows
/// are observations. The model assumes `x` and the columns of `z` are
/// centered; io::load_dataset centers by default.
struct Dataset {
    Eigen::VectorXd y;
    Eigen::VectorXd x;
    Eigen::MatrixXd z;

    Eigen::Index n() const { return y.size(); }
    Eigen::Index num_instruments() const { return z.cols(); }

    /// Throws InvalidInput unless n >= 2, K >= 1, row counts agree, and every
    /// entry is finite.
    void validate() const;
};

/// Null residuals e_i = y_i - x_i * beta0 at the hypothesized coefficient.
struct Residuals {
    Eigen::VectorXd e;
    double beta0 = 0.0;
};

Residuals residuals(const Dataset& data, double beta0);

}  // namespace weakiv
