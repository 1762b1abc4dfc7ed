#include "weakiv/dataset.hpp"

#include <cmath>

namespace weakiv {

void Dataset::validate() const {
    const Eigen::Index rows = y.size();
    if (rows < 2) {
        throw InvalidInput("dataset needs at least 2 observations");
    }
    if (x.size() != rows || z.rows() != rows) {
        throw InvalidInput("row counts of Y, X, Z disagree");
    }
    if (z.cols() < 1) {
        throw InvalidInput("dataset needs at least one instrument column");
    }
    if (!y.allFinite() || !x.allFinite() || !z.allFinite()) {
        throw InvalidInput("dataset contains non-finite entries");
    }
}

Residuals residuals(const Dataset& data, double beta0) {
    data.validate();
    if (!std::isfinite(beta0)) {
        throw InvalidInput("beta0 must be finite");
    }
    return Residuals{data.y - beta0 * data.x, beta0};
}

}  // namespace weakiv
