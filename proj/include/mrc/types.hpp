#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace mrc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Raised for malformed inputs, failed preconditions and infeasible requests.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class Regime { Bull, Volatile, Bear };

inline constexpr std::array<Regime, 3> kAllRegimes{Regime::Bull, Regime::Volatile, Regime::Bear};

std::string_view to_string(Regime r);
Regime regime_from_string(std::string_view s);

// Asset weights plus a cash leg. Cash is mixed like any other coordinate.
struct Portfolio {
    Vector assets;
    double cash = 0.0;

    Portfolio() = default;
    Portfolio(Vector a, double c) : assets(std::move(a)), cash(c) {}

    static Portfolio all_cash(Eigen::Index k) { return {Vector::Zero(k), 1.0}; }
    static Portfolio equal_weight(Eigen::Index k, double cash = 0.0) {
        return {Vector::Constant(k, (1.0 - cash) / static_cast<double>(k)), cash};
    }

    Eigen::Index size() const { return assets.size(); }
    double long_mass() const { return assets.sum(); }
    double total() const { return assets.sum() + cash; }

    // (K+1)-vector with cash as the last coordinate.
    Vector stacked() const;
    static Portfolio from_stacked(const Vector& v);

    bool feasible(double w_max, double c_max, double tol = 1e-9) const;

    friend bool operator==(const Portfolio& a, const Portfolio& b) {
        return a.cash == b.cash && a.assets.size() == b.assets.size() && a.assets == b.assets;
    }
};

}  // namespace mrc
