#include "fusionlab/matrix.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <cmath>
#include <sstream>

#include "fusionlab/errors.hpp"

namespace fusionlab {

namespace {

constexpr int kMaxHaarAttempts = 8;

bool all_finite(const Matrix4 &m) {
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            if (!std::isfinite(m(r, c).real()) || !std::isfinite(m(r, c).imag())) {
                return false;
            }
        }
    }
    return true;
}

Matrix4 real_matrix(const std::array<std::array<double, 4>, 4> &rows, double scale) {
    Matrix4 m;
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            m(r, c) = Complex(scale * rows[r][c], 0.0);
        }
    }
    return m;
}

}  // namespace

NotUnitary::NotUnitary(double max_deviation)
    : FusionError([&] {
          std::ostringstream os;
          os << "matrix is not unitary: max |U^dag U - I| = " << max_deviation;
          return os.str();
      }()),
      max_deviation_(max_deviation) {}

TooManyQubits::TooManyQubits(int requested)
    : FusionError("too many qubits for a dense state vector: " + std::to_string(requested) + " > 14") {}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::string Provenance::describe() const {
    switch (kind) {
        case Kind::Builtin:
            return "builtin:" + label;
        case Kind::File:
            return "file:" + label;
        case Kind::Sampled:
            return "haar(seed=" + std::to_string(seed) + ")";
        case Kind::Parameterized:
            return "params";
        case Kind::Derived:
            break;
    }
    return label.empty() ? "derived" : label;
}

double unitarity_deviation(const Matrix4 &m) {
    Matrix4 g = m.adjoint() * m - Matrix4::Identity();
    return g.cwiseAbs().maxCoeff();
}

FusionMatrix FusionMatrix::validate(const Matrix4 &m, double tol, Provenance provenance) {
    if (!(tol > 0.0)) {
        throw MalformedInput("unitarity tolerance must be positive");
    }
    if (!all_finite(m)) {
        throw MalformedInput("matrix has non-finite entries");
    }
    double dev = unitarity_deviation(m);
    if (dev > tol) {
        throw NotUnitary(dev);
    }
    return FusionMatrix(m, std::move(provenance));
}

FusionMatrix validate_unitary(const std::vector<std::vector<Complex>> &grid, double tol) {
    if (grid.size() != 4) {
        throw MalformedInput("expected 4 rows, got " + std::to_string(grid.size()));
    }
    Matrix4 m;
    for (int r = 0; r < 4; ++r) {
        if (grid[r].size() != 4) {
            throw MalformedInput("row " + std::to_string(r) + " has " + std::to_string(grid[r].size()) +
                                 " entries, expected 4");
        }
        for (int c = 0; c < 4; ++c) {
            m(r, c) = grid[r][c];
        }
    }
    return FusionMatrix::validate(m, tol);
}

QrFactors positive_diagonal_qr(const Matrix4 &m) {
    Eigen::HouseholderQR<Matrix4> qr(m);
    Matrix4 q = qr.householderQ();
    Matrix4 r = qr.matrixQR().triangularView<Eigen::Upper>();
    double scale = m.cwiseAbs().maxCoeff();
    for (int i = 0; i < 4; ++i) {
        double mag = std::abs(r(i, i));
        if (!(mag > 1e-14 * scale)) {
            throw DegenerateSample("QR factor has a vanishing diagonal entry");
        }
        // Complex generalization of sign(R_ii): move the phase of R_ii into Q.
        Complex phase = r(i, i) / mag;
        q.col(i) *= phase;
        r.row(i) *= std::conj(phase);
        r(i, i) = Complex(mag, 0.0);
    }
    return {q, r};
}

FusionMatrix haar_sample(Rng &rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int attempt = 0; attempt < kMaxHaarAttempts; ++attempt) {
        Matrix4 m;
        for (int r = 0; r < 4; ++r) {
            for (int c = 0; c < 4; ++c) {
                double re = normal(rng);
                double im = normal(rng);
                m(r, c) = Complex(re, im);
            }
        }
        try {
            QrFactors f = positive_diagonal_qr(m);
            return FusionMatrix::validate(f.q, kDefaultUnitaryTol, {Provenance::Kind::Sampled, "haar", 0});
        } catch (const DegenerateSample &) {
            continue;
        }
    }
    throw DegenerateSample("Haar sampling produced degenerate matrices repeatedly");
}

Matrix4 hermitian_generator(const UnitaryParams &p) {
    for (double v : p) {
        if (!std::isfinite(v)) {
            throw MalformedInput("unitary parameters must be finite");
        }
    }
    Matrix4 h = Matrix4::Zero();
    for (int k = 0; k < 4; ++k) {
        h(k, k) = Complex(p[k], 0.0);
    }
    int slot = 4;
    for (int k = 0; k < 4; ++k) {
        for (int l = k + 1; l < 4; ++l) {
            Complex z(p[slot], p[slot + 1]);
            h(k, l) = z;
            h(l, k) = std::conj(z);
            slot += 2;
        }
    }
    return h;
}

Matrix4 unitary_from_params(const UnitaryParams &p) {
    Matrix4 h = hermitian_generator(p);
    Eigen::SelfAdjointEigenSolver<Matrix4> eig(h);
    const auto &vals = eig.eigenvalues();
    const Matrix4 &vecs = eig.eigenvectors();
    Eigen::Vector4cd phases;
    for (int k = 0; k < 4; ++k) {
        phases(k) = std::polar(1.0, vals(k));
    }
    return vecs * phases.asDiagonal() * vecs.adjoint();
}

FusionMatrix from_params(const UnitaryParams &p) {
    return FusionMatrix::validate(unitary_from_params(p), kDefaultUnitaryTol, {Provenance::Kind::Parameterized, "", 0});
}

FusionMatrix phase_multiply(const FusionMatrix &u, const std::array<double, 4> &left,
                            const std::array<double, 4> &right) {
    Matrix4 m = u.matrix();
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
            m(r, c) *= std::polar(1.0, left[r] + right[c]);
        }
    }
    return FusionMatrix::validate(m, kDefaultUnitaryTol, {Provenance::Kind::Derived, "phase(" + u.provenance().describe() + ")", 0});
}

std::vector<std::string> builtin_names() { return {"identity", "pbs2", "theorem7", "blockpair"}; }

FusionMatrix builtin_matrix(std::string_view name) {
    Provenance prov{Provenance::Kind::Builtin, std::string(name), 0};
    const double s = 1.0 / std::sqrt(2.0);
    if (name == "identity") {
        return FusionMatrix::validate(Matrix4::Identity(), kDefaultUnitaryTol, prov);
    }
    if (name == "pbs2") {
        return FusionMatrix::validate(real_matrix({{{1, 1, 1, -1}, {1, 1, -1, 1}, {1, -1, 1, 1}, {-1, 1, 1, 1}}}, 0.5),
                                      kDefaultUnitaryTol, prov);
    }
    if (name == "theorem7") {
        // Two 45-degree rotations: (a_H, b_H) and (a_V, b_V).
        return FusionMatrix::validate(
            real_matrix({{{1, 0, 1, 0}, {0, 1, 0, 1}, {-1, 0, 1, 0}, {0, -1, 0, 1}}}, s), kDefaultUnitaryTol, prov);
    }
    if (name == "blockpair") {
        // Hadamard on (a_H, a_V) -> (c_H, c_V) and on (b_H, b_V) -> (d_H, d_V).
        return FusionMatrix::validate(
            real_matrix({{{1, 1, 0, 0}, {1, -1, 0, 0}, {0, 0, 1, 1}, {0, 0, 1, -1}}}, s), kDefaultUnitaryTol, prov);
    }
    throw MalformedInput("unknown builtin matrix '" + std::string(name) + "'");
}

}  // namespace fusionlab
