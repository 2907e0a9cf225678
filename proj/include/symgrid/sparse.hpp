#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace symgrid {

template <class T>
struct Triplet {
    int row = 0;
    int col = 0;
    T value{};
};

class SingularMatrixError : public std::runtime_error {
  public:
    SingularMatrixError(int pivot_row, const std::string& message)
        : std::runtime_error(message), pivot_row_(pivot_row) {}
    int pivot_row() const noexcept { return pivot_row_; }

  private:
    int pivot_row_;
};

/// Compressed-row matrix assembled from triplets (duplicates are summed).
template <class T>
class SparseMatrix {
  public:
    SparseMatrix() = default;
    SparseMatrix(int rows, int cols, std::vector<Triplet<T>> entries) : rows_(rows), cols_(cols) {
        std::sort(entries.begin(), entries.end(), [](const Triplet<T>& a, const Triplet<T>& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
        row_start_.assign(static_cast<std::size_t>(rows) + 1, 0);
        for (const auto& t : entries) {
            if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols)
                throw std::out_of_range("sparse entry outside the matrix");
            if (!col_.empty() && last_row_ == t.row && col_.back() == t.col) {
                val_.back() += t.value;
                continue;
            }
            col_.push_back(t.col);
            val_.push_back(t.value);
            last_row_ = t.row;
            ++row_start_[static_cast<std::size_t>(t.row) + 1];
        }
        for (int r = 0; r < rows; ++r) row_start_[r + 1] += row_start_[r];
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    std::size_t nonzeros() const { return val_.size(); }

    template <class F>
    void for_each_in_row(int r, F&& f) const {
        for (int k = row_start_[r]; k < row_start_[r + 1]; ++k) f(col_[k], val_[k]);
    }

    std::vector<T> multiply(const std::vector<T>& x) const {
        std::vector<T> y(static_cast<std::size_t>(rows_), T{});
        for (int r = 0; r < rows_; ++r) for_each_in_row(r, [&](int c, const T& v) { y[r] += v * x[c]; });
        return y;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : val_) m = std::max(m, static_cast<double>(std::abs(v)));
        return m;
    }

  private:
    int rows_ = 0;
    int cols_ = 0;
    int last_row_ = -1;
    std::vector<int> row_start_{0};
    std::vector<int> col_;
    std::vector<T> val_;
};

/// Row-oriented sparse Gaussian elimination with partial (column) pivoting.
/// A pivot smaller than 1e-12 * max|A| is treated as singular.
template <class T>
class SparseLU {
  public:
    explicit SparseLU(const SparseMatrix<T>& a) { factor(a); }

    std::vector<T> solve(std::vector<T> b) const {
        const int n = static_cast<int>(perm_.size());
        if (static_cast<int>(b.size()) != n) throw std::invalid_argument("right-hand side size mismatch");
        // Forward substitution; multipliers are keyed by original row.
        std::vector<T> y = std::move(b);
        for (int k = 0; k < n; ++k) {
            const T yk = y[perm_[k]];
            for (const auto& [i, m] : lower_[k]) y[i] -= m * yk;
        }
        // Back substitution on U (row perm_[k] holds columns >= k).
        std::vector<T> x(static_cast<std::size_t>(n));
        for (int k = n - 1; k >= 0; --k) {
            T s = y[perm_[k]];
            T diag{};
            for (const auto& [c, v] : upper_[k]) {
                if (c == k)
                    diag = v;
                else
                    s -= v * x[c];
            }
            x[k] = s / diag;
        }
        return x;
    }

    std::size_t fill_in() const {
        std::size_t n = 0;
        for (const auto& r : upper_) n += r.size();
        for (const auto& r : lower_) n += r.size();
        return n;
    }

  private:
    using Row = std::vector<std::pair<int, T>>;  // sorted by column

    static const T* lookup(const Row& row, int col) {
        auto it = std::lower_bound(row.begin(), row.end(), col,
                                   [](const std::pair<int, T>& e, int c) { return e.first < c; });
        return (it != row.end() && it->first == col) ? &it->second : nullptr;
    }

    // row_i -= m * row_k, restricted to columns > k (column k is eliminated).
    static Row axpy(const Row& ri, const Row& rk, T m, int k) {
        Row out;
        out.reserve(ri.size() + rk.size());
        auto a = ri.begin();
        auto b = rk.begin();
        while (a != ri.end() || b != rk.end()) {
            if (b == rk.end() || (a != ri.end() && a->first < b->first)) {
                if (a->first != k) out.push_back(*a);
                ++a;
            } else if (a == ri.end() || b->first < a->first) {
                if (b->first != k) out.emplace_back(b->first, -m * b->second);
                ++b;
            } else {
                if (a->first != k) out.emplace_back(a->first, a->second - m * b->second);
                ++a;
                ++b;
            }
        }
        return out;
    }

    void factor(const SparseMatrix<T>& a) {
        const int n = a.rows();
        if (a.cols() != n) throw std::invalid_argument("LU requires a square matrix");
        const double threshold = 1e-12 * a.max_abs();
        std::vector<Row> rows(static_cast<std::size_t>(n));
        for (int r = 0; r < n; ++r) a.for_each_in_row(r, [&](int c, const T& v) { rows[r].emplace_back(c, v); });
        // order[k] = original row placed at elimination position k
        std::vector<int> order(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) order[i] = i;
        upper_.assign(static_cast<std::size_t>(n), {});
        lower_.assign(static_cast<std::size_t>(n), {});
        perm_.assign(static_cast<std::size_t>(n), 0);

        for (int k = 0; k < n; ++k) {
            int best = -1;
            double best_mag = -1.0;
            for (int p = k; p < n; ++p) {
                if (const T* v = lookup(rows[order[p]], k)) {
                    double mag = std::abs(*v);
                    if (mag > best_mag) {
                        best_mag = mag;
                        best = p;
                    }
                }
            }
            if (best < 0 || best_mag <= threshold || best_mag == 0.0)
                throw SingularMatrixError(k, "singular matrix: no usable pivot in column " + std::to_string(k));
            std::swap(order[k], order[best]);
            const Row& pivot_row = rows[order[k]];
            const T pivot = *lookup(pivot_row, k);
            for (int p = k + 1; p < n; ++p) {
                Row& ri = rows[order[p]];
                const T* v = lookup(ri, k);
                if (!v) continue;
                T m = *v / pivot;
                ri = axpy(ri, pivot_row, m, k);
                lower_[k].emplace_back(order[p], m);
            }
        }
        for (int k = 0; k < n; ++k) {
            perm_[k] = order[k];
            upper_[k] = rows[order[k]];
        }
    }

    std::vector<int> perm_;
    std::vector<Row> upper_;
    std::vector<std::vector<std::pair<int, T>>> lower_;
};

/// Solves A x = b for a square sparse system given as triplets.
template <class T>
std::vector<T> sparse_solve(int n, const std::vector<Triplet<T>>& entries, std::vector<T> b) {
    SparseMatrix<T> a(n, n, entries);
    return SparseLU<T>(a).solve(std::move(b));
}

}  // namespace symgrid
