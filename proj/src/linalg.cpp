#include "lcsmech/linalg.hpp"

#include <stdexcept>

namespace lcsmech::linalg {

using expr::ScalarExpr;

ScalarExpr determinant(const ExprMatrix& m) {
    const int n = static_cast<int>(m.size());
    if (n == 0) return ScalarExpr(1L);
    if (n > 16) throw std::invalid_argument("determinant: matrix too large");
    for (const auto& row : m)
        if (static_cast<int>(row.size()) != n) throw std::invalid_argument("determinant: matrix not square");
    // minors[S] = det of the first popcount(S) rows restricted to columns S.
    std::vector<ScalarExpr> minors(std::size_t{1} << n);
    minors[0] = ScalarExpr(1L);
    for (unsigned s = 1; s < (1u << n); ++s) {
        const int row = __builtin_popcount(s) - 1;
        ScalarExpr acc;
        for (int j = 0; j < n; ++j) {
            if (!(s & (1u << j))) continue;
            const ScalarExpr& a = m[static_cast<std::size_t>(row)][static_cast<std::size_t>(j)];
            const ScalarExpr& sub = minors[s & ~(1u << j)];
            if (!a.is_zero() && !sub.is_zero()) {
                // Sign from moving column j past the columns of S after it.
                const int after = __builtin_popcount(s >> (j + 1));
                acc += (after % 2 == 0 ? a : -a) * sub;
            }
        }
        minors[s] = acc;
    }
    return minors[(1u << n) - 1];
}

ExprMatrix cofactors(const ExprMatrix& m) {
    const std::size_t n = m.size();
    ExprMatrix c(n, std::vector<ScalarExpr>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            ExprMatrix minor;
            for (std::size_t r = 0; r < n; ++r) {
                if (r == i) continue;
                std::vector<ScalarExpr> row;
                for (std::size_t k = 0; k < n; ++k)
                    if (k != j) row.push_back(m[r][k]);
                minor.push_back(std::move(row));
            }
            const ScalarExpr d = determinant(minor);
            c[i][j] = (i + j) % 2 == 0 ? d : -d;
        }
    return c;
}

double pfaffian(Eigen::MatrixXd a) {
    const Eigen::Index n = a.rows();
    if (n % 2 != 0) return 0.0;
    double pf = 1.0;
    for (Eigen::Index k = 0; k + 1 < n; k += 2) {
        Eigen::Index kp;
        a.col(k).tail(n - k - 1).cwiseAbs().maxCoeff(&kp);
        kp += k + 1;
        if (kp != k + 1) {
            a.row(k + 1).swap(a.row(kp));
            a.col(k + 1).swap(a.col(kp));
            pf = -pf;
        }
        if (a(k + 1, k) == 0.0) return 0.0;
        pf *= a(k, k + 1);
        const Eigen::Index rest = n - k - 2;
        if (rest > 0) {
            const Eigen::VectorXd tau = a.row(k).tail(rest).transpose() / a(k, k + 1);
            const Eigen::VectorXd col = a.col(k + 1).tail(rest);
            a.bottomRightCorner(rest, rest) += tau * col.transpose() - col * tau.transpose();
        }
    }
    return pf;
}

}  // namespace lcsmech::linalg
