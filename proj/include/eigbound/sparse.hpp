#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace eigbound {

/// Triplet-accumulated sparse matrix, finalized into compressed column
/// storage. Duplicate (i,j) contributions are summed on finalize(); the
/// symmetric flag is verified there.
class SparseMatrix {
public:
    SparseMatrix() = default;
    SparseMatrix(int rows, int cols, bool symmetric = false);

    void add(int i, int j, double value);
    void finalize();

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    bool is_symmetric() const { return symmetric_; }
    bool is_finalized() const { return finalized_; }

    double coeff(int i, int j) const;
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
    Eigen::VectorXd apply_transpose(const Eigen::VectorXd& x) const;

    const Eigen::SparseMatrix<double>& matrix() const;
    Eigen::MatrixXd dense() const;

    /// Coordinate text format, one "i j value" per line, 0-based.
    void write_coordinate(std::ostream& out) const;
    static SparseMatrix read_coordinate(std::istream& in);

private:
    int rows_ = 0;
    int cols_ = 0;
    bool symmetric_ = false;
    bool finalized_ = false;
    std::vector<Eigen::Triplet<double>> triplets_;
    Eigen::SparseMatrix<double> mat_;
};

} // namespace eigbound
