#include "svd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include <Eigen/Householder>

#include "tsgresp/error.hpp"

namespace tsg::detail {

namespace {

// Column rotation on a factor F: F[:,a], F[:,b] <- c F[:,a] + s F[:,b], c F[:,b] - s F[:,a].
// A rotation with b == npos negates column a instead.
struct Rotation {
    std::size_t a;
    std::size_t b;
    double c;
    double s;
};

constexpr std::size_t kNegate = std::numeric_limits<std::size_t>::max();
constexpr int kMaxSweeps = 75;

// Replays the logged column operations on selected columns of the identity:
// F = I R_1 R_2 ... R_K, so F e_q = R_1 (R_2 (... R_K e_q)).
Matrix replay(const std::vector<Rotation>& log, std::size_t n,
              const std::vector<std::size_t>& columns) {
    Matrix x = Matrix::Zero(static_cast<Eigen::Index>(n),
                            static_cast<Eigen::Index>(columns.size()));
    for (std::size_t c = 0; c < columns.size(); ++c)
        x(static_cast<Eigen::Index>(columns[c]), static_cast<Eigen::Index>(c)) = 1.0;
    for (auto it = log.rbegin(); it != log.rend(); ++it) {
        const auto a = static_cast<Eigen::Index>(it->a);
        if (it->b == kNegate) {
            x.row(a) = -x.row(a);
            continue;
        }
        const auto b = static_cast<Eigen::Index>(it->b);
        for (Eigen::Index c = 0; c < x.cols(); ++c) {
            const double xa = x(a, c);
            const double xb = x(b, c);
            x(a, c) = it->c * xa - it->s * xb;
            x(b, c) = it->s * xa + it->c * xb;
        }
    }
    return x;
}

// Diagonalizes the upper bidiagonal (w, e), where e[i] couples w[i-1] and w[i]
// and e[0] = 0. Rotations applied to the left and right factors are logged.
void bidiagonal_qr(std::vector<double>& w, std::vector<double>& e, std::vector<Rotation>& left,
                   std::vector<Rotation>& right) {
    const std::size_t n = w.size();
    double anorm = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        anorm = std::max(anorm, std::abs(w[i]) + std::abs(e[i]));
    const double tol = std::numeric_limits<double>::epsilon() * anorm;

    for (std::size_t kk = n; kk-- > 0;) {
        const std::size_t k = kk;
        for (int sweep = 1;; ++sweep) {
            // Find the top l of the unreduced block ending at k.
            bool cancel = true;
            std::size_t l = k;
            for (;; --l) {
                if (l == 0 || std::abs(e[l]) <= tol) {
                    cancel = false;
                    break;
                }
                if (std::abs(w[l - 1]) <= tol)
                    break;
            }
            if (cancel) {
                // w[l-1] is negligible: chase e[l] out with left rotations.
                const std::size_t nm = l - 1;
                double c = 0.0;
                double s = 1.0;
                for (std::size_t i = l; i <= k; ++i) {
                    const double f = s * e[i];
                    e[i] = c * e[i];
                    if (std::abs(f) <= tol)
                        break;
                    const double g = w[i];
                    const double h = std::hypot(f, g);
                    w[i] = h;
                    c = g / h;
                    s = -f / h;
                    left.push_back({nm, i, c, s});
                }
            }
            const double z = w[k];
            if (l == k) {
                if (z < 0.0) {
                    w[k] = -z;
                    right.push_back({k, kNegate, 0.0, 0.0});
                }
                break;
            }
            if (sweep == kMaxSweeps)
                fail(ErrorCode::numerical, "SVD did not converge");

            // Wilkinson-type shift from the trailing 2 x 2 block.
            double x = w[l];
            double y = w[k - 1];
            double g = e[k - 1];
            double h = e[k];
            double f = ((y - z) * (y + z) + (g - h) * (g + h)) / (2.0 * h * y);
            g = std::hypot(f, 1.0);
            f = ((x - z) * (x + z) + h * ((y / (f + std::copysign(g, f))) - h)) / x;

            double c = 1.0;
            double s = 1.0;
            for (std::size_t j = l; j < k; ++j) {
                const std::size_t i = j + 1;
                g = e[i];
                y = w[i];
                h = s * g;
                g = c * g;
                double zz = std::hypot(f, h);
                e[j] = zz;
                c = f / zz;
                s = h / zz;
                f = x * c + g * s;
                g = g * c - x * s;
                h = y * s;
                y *= c;
                right.push_back({j, i, c, s});
                zz = std::hypot(f, h);
                w[j] = zz;
                if (zz != 0.0) {
                    c = f / zz;
                    s = h / zz;
                }
                f = c * g + s * y;
                x = c * y - s * g;
                left.push_back({j, i, c, s});
            }
            e[l] = 0.0;
            e[k] = f;
            w[k] = x;
        }
    }
}

TopSvd tall_svd(Matrix work, std::size_t d) {
    const Eigen::Index m = work.rows();
    const Eigen::Index n = work.cols();

    // Householder bidiagonalization in place: left reflector k lives in
    // column k below the diagonal, right reflector k in row k right of the
    // superdiagonal.
    std::vector<double> w(static_cast<std::size_t>(n), 0.0);
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    std::vector<double> tau_left(static_cast<std::size_t>(n), 0.0);
    std::vector<double> tau_right(static_cast<std::size_t>(n), 0.0);
    Vector workspace(std::max(m, n));
    for (Eigen::Index k = 0; k < n; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        double beta = 0.0;
        work.col(k).tail(m - k).makeHouseholderInPlace(tau_left[ku], beta);
        w[ku] = beta;
        if (k + 1 < n)
            work.bottomRightCorner(m - k, n - k - 1)
                .applyHouseholderOnTheLeft(work.col(k).tail(m - k - 1), tau_left[ku],
                                           workspace.data());
        if (k + 1 < n) {
            work.row(k).tail(n - k - 1).makeHouseholderInPlace(tau_right[ku], beta);
            e[ku + 1] = beta;
            work.bottomRightCorner(m - k - 1, n - k - 1)
                .applyHouseholderOnTheRight(work.row(k).tail(n - k - 2).transpose(),
                                            tau_right[ku], workspace.data());
        }
    }

    std::vector<Rotation> left_log, right_log;
    left_log.reserve(static_cast<std::size_t>(4 * n * n));
    right_log.reserve(static_cast<std::size_t>(4 * n * n));
    bidiagonal_qr(w, e, left_log, right_log);

    std::vector<std::size_t> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return w[a] > w[b]; });
    order.resize(d);

    const auto di = static_cast<Eigen::Index>(d);
    TopSvd out;
    out.sigma.resize(di);
    for (Eigen::Index c = 0; c < di; ++c)
        out.sigma(c) = w[order[static_cast<std::size_t>(c)]];

    // U = Q [U_B; 0] and V = P V_B, applying the reflectors last to first.
    out.U = Matrix::Zero(m, di);
    out.U.topRows(n) = replay(left_log, static_cast<std::size_t>(n), order);
    for (Eigen::Index k = n; k-- > 0;)
        out.U.bottomRows(m - k).applyHouseholderOnTheLeft(
            work.col(k).tail(m - k - 1), tau_left[static_cast<std::size_t>(k)], workspace.data());

    out.V = replay(right_log, static_cast<std::size_t>(n), order);
    for (Eigen::Index k = n - 1; k-- > 0;)
        out.V.bottomRows(n - k - 1).applyHouseholderOnTheLeft(
            work.row(k).tail(n - k - 2).transpose(), tau_right[static_cast<std::size_t>(k)],
            workspace.data());
    return out;
}

}  // namespace

TopSvd golub_kahan_svd(const Matrix& a, std::size_t d) {
    require(d <= static_cast<std::size_t>(std::min(a.rows(), a.cols())),
            "requested more singular triplets than min(rows, cols)");
    if (a.rows() >= a.cols())
        return tall_svd(a, d);
    TopSvd t = tall_svd(a.transpose(), d);
    std::swap(t.U, t.V);
    return t;
}

}  // namespace tsg::detail
