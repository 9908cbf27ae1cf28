#pragma once

#include <Eigen/Core>
#include <array>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace fusionlab {

using Complex = std::complex<double>;
using Matrix4 = Eigen::Matrix4cd;

inline constexpr double kDefaultUnitaryTol = 1e-9;

/// Random stream used by every sampler in the library. One stream per task;
/// parallel workers derive their own with derive_seed().
using Rng = std::mt19937_64;

/// Mixes a master seed with a stream index (splitmix64 finalizer) so that
/// sibling streams are decorrelated.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Where a fusion matrix came from. Carried along for reports only.
struct Provenance {
    enum class Kind { Builtin, File, Sampled, Parameterized, Derived };
    Kind kind = Kind::Derived;
    std::string label;
    std::uint64_t seed = 0;

    std::string describe() const;
};

/// A 4x4 unitary acting on the photon creation operators
/// (a_H, a_V, b_H, b_V) -> (c_H, c_V, d_H, d_V). Only constructible through
/// validation, so holding one means U^dagger U = I within the tolerance used.
class FusionMatrix {
  public:
    static FusionMatrix validate(const Matrix4 &m, double tol = kDefaultUnitaryTol, Provenance provenance = {});

    const Matrix4 &matrix() const noexcept { return m_; }
    /// Zero-based element access.
    Complex operator()(int row, int col) const { return m_(row, col); }
    const Provenance &provenance() const noexcept { return provenance_; }

  private:
    FusionMatrix(const Matrix4 &m, Provenance provenance) : m_(m), provenance_(std::move(provenance)) {}

    Matrix4 m_;
    Provenance provenance_;
};

/// max_{kl} |(U^dagger U - I)_{kl}|
double unitarity_deviation(const Matrix4 &m);

/// Validates a row-major grid. Throws MalformedInput on wrong shape or
/// non-finite entries and NotUnitary when the deviation exceeds tol.
FusionMatrix validate_unitary(const std::vector<std::vector<Complex>> &grid, double tol = kDefaultUnitaryTol);

struct QrFactors {
    Matrix4 q;
    Matrix4 r;
};

/// Householder QR followed by the phase fix that makes diag(R) real and
/// strictly positive. Throws DegenerateSample if a diagonal entry of R vanishes.
QrFactors positive_diagonal_qr(const Matrix4 &m);

/// Haar-distributed unitary: Gaussian complex matrix, QR, diagonal phase fix.
FusionMatrix haar_sample(Rng &rng);

/// 16 generator coordinates: entries 0..3 are the diagonal of H, then for each
/// pair (k,l) in (0,1),(0,2),(0,3),(1,2),(1,3),(2,3) the real and imaginary
/// part of H_kl.
using UnitaryParams = std::array<double, 16>;

Matrix4 hermitian_generator(const UnitaryParams &p);

/// exp(iH) for the Hermitian generator H built from p.
Matrix4 unitary_from_params(const UnitaryParams &p);
FusionMatrix from_params(const UnitaryParams &p);

/// diag(e^{i left}) * U * diag(e^{i right})
FusionMatrix phase_multiply(const FusionMatrix &u, const std::array<double, 4> &left,
                            const std::array<double, 4> &right);

/// "identity", "pbs2", "theorem7", "blockpair".
FusionMatrix builtin_matrix(std::string_view name);
std::vector<std::string> builtin_names();

}  // namespace fusionlab
