#include "eigbound/sparse.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace eigbound {

SparseMatrix::SparseMatrix(int rows, int cols, bool symmetric)
    : rows_(rows), cols_(cols), symmetric_(symmetric) {
    if (rows < 0 || cols < 0)
        throw std::invalid_argument("SparseMatrix: negative dimension");
    if (symmetric && rows != cols)
        throw std::invalid_argument("SparseMatrix: symmetric flag on non-square matrix");
}

void SparseMatrix::add(int i, int j, double value) {
    if (finalized_)
        throw std::logic_error("SparseMatrix::add after finalize");
    if (i < 0 || i >= rows_ || j < 0 || j >= cols_)
        throw std::out_of_range("SparseMatrix::add: index out of range");
    triplets_.emplace_back(i, j, value);
}

void SparseMatrix::finalize() {
    if (finalized_) return;
    mat_.resize(rows_, cols_);
    mat_.setFromTriplets(triplets_.begin(), triplets_.end());
    mat_.makeCompressed();
    triplets_.clear();
    triplets_.shrink_to_fit();
    finalized_ = true;

    if (symmetric_) {
        double maxabs = 0.0;
        for (int k = 0; k < mat_.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(mat_, k); it; ++it)
                maxabs = std::max(maxabs, std::abs(it.value()));
        const Eigen::SparseMatrix<double> diff =
            mat_ - Eigen::SparseMatrix<double>(mat_.transpose());
        for (int k = 0; k < diff.outerSize(); ++k)
            for (Eigen::SparseMatrix<double>::InnerIterator it(diff, k); it; ++it)
                if (std::abs(it.value()) > 1e-14 * std::max(maxabs, 1.0))
                    throw std::runtime_error("SparseMatrix: symmetric flag violated");
    }
}

const Eigen::SparseMatrix<double>& SparseMatrix::matrix() const {
    if (!finalized_)
        throw std::logic_error("SparseMatrix: not finalized");
    return mat_;
}

double SparseMatrix::coeff(int i, int j) const { return matrix().coeff(i, j); }

Eigen::VectorXd SparseMatrix::apply(const Eigen::VectorXd& x) const {
    return matrix() * x;
}

Eigen::VectorXd SparseMatrix::apply_transpose(const Eigen::VectorXd& x) const {
    return matrix().transpose() * x;
}

Eigen::MatrixXd SparseMatrix::dense() const { return Eigen::MatrixXd(matrix()); }

void SparseMatrix::write_coordinate(std::ostream& out) const {
    const auto& m = matrix();
    out << "%%MatrixMarket-compatible coordinate real general\n";
    out << rows_ << " " << cols_ << " " << m.nonZeros() << "\n";
    char buf[64];
    for (int k = 0; k < m.outerSize(); ++k) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it) {
            std::snprintf(buf, sizeof buf, "%ld %ld %.17g",
                          static_cast<long>(it.row()), static_cast<long>(it.col()),
                          it.value());
            out << buf << "\n";
        }
    }
}

SparseMatrix SparseMatrix::read_coordinate(std::istream& in) {
    std::string line;
    long rows = -1, cols = -1, nnz = -1;
    std::vector<std::array<double, 3>> entries;
    while (std::getline(in, line)) {
        const auto b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos || line[b] == '%') continue;
        std::istringstream ss(line.substr(b));
        if (rows < 0) {
            if (!(ss >> rows >> cols >> nnz))
                throw std::runtime_error("coordinate read: bad size line");
            continue;
        }
        long i, j;
        double v;
        if (!(ss >> i >> j >> v))
            throw std::runtime_error("coordinate read: bad entry line");
        entries.push_back({static_cast<double>(i), static_cast<double>(j), v});
    }
    if (rows < 0)
        throw std::runtime_error("coordinate read: missing size line");
    SparseMatrix out(static_cast<int>(rows), static_cast<int>(cols));
    for (const auto& e : entries)
        out.add(static_cast<int>(e[0]), static_cast<int>(e[1]), e[2]);
    out.finalize();
    return out;
}

} // namespace eigbound
