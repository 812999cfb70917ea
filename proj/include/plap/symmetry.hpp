// The groups G_j = Gamma^j x Lambda_j acting on R^N = (C^2)^j x R^{N-4j},
// the sign homomorphism phi_j, Haar sampling, the phi-equivariant averaging
// projector, fixed-point subspaces, orbit separation, and the hypothesis
// checks (S1)-(S3).
//
// Gamma is generated by the diagonal circle action e^{i theta} and the
// antiholomorphic twist rho(z1, z2) = (-conj(z2), conj(z1)); phi sends the
// circle to +1 and rho to -1, and rho^2 = e^{i pi}.  Elements are stored in
// the coset normal form rho^flip . R(theta) per block, which composes exactly
// via rho R(theta) = R(-theta) rho.
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "plap/grid.hpp"

namespace plap {

struct SymmetryConfig {
    int dim = 4;                  // N
    int blocks = 1;               // j with 4j <= N
    int samples_per_circle = 16;  // M, equispaced angles per circle factor
    int lambda_samples = 32;      // Haar draws over O(N-4j) when nontrivial
    std::uint64_t seed = 1;

    static SymmetryConfig make(int dim, int blocks, int samples_per_circle = 16,
                               int lambda_samples = 32, std::uint64_t seed = 1);

    int max_blocks() const { return dim / 4; }       // n in N = 4n + m
    int lambda_dim() const { return dim - 4 * blocks; }
    // Lambda_j = O(N-4j) for j < n; Lambda_n is trivial.
    bool lambda_trivial() const { return blocks == max_blocks(); }
};

struct BlockRotation {
    double theta = 0.0;
    bool flip = false;  // multiply by rho after the rotation
};

struct GroupElement {
    std::vector<BlockRotation> block;  // size j
    std::vector<double> lambda;        // row-major d x d, empty means identity
    int lambda_dim = 0;

    int sign() const {
        int s = 1;
        for (const auto& b : block)
            if (b.flip) s = -s;
        return s;
    }
};

GroupElement group_identity(const SymmetryConfig& config);
GroupElement compose(const GroupElement& a, const GroupElement& b);

// Isometric action; |act(g,x)| = |x|.
void act(const GroupElement& g, std::span<const double> x, std::span<double> out);
Point act(const GroupElement& g, std::span<const double> x);

// Random element with continuous angles, fair flips, Haar lambda part.
GroupElement random_element(const SymmetryConfig& config, std::mt19937_64& rng);

struct WeightedElement {
    GroupElement element;
    double weight;
};

// Tensor-product quadrature of the Haar measure: M equispaced angles and both
// rho-cosets per block (exact for trigonometric degree < M), Monte Carlo over
// the orthogonal factor with a fixed seed.  Weights are uniform and sum to 1.
std::vector<WeightedElement> haar_sample(const SymmetryConfig& config);

// Signed Haar average P(u)(x) = sum_g w_g phi(g) u(g x) on interior nodes.
// Requires the grid mask to be symmetric under the group.
Field equivariant_project(const Field& u, const SymmetryConfig& config);

// max over random probes (x, g) of |u(gx) - phi(g) u(x)|, by interpolation.
double equivariance_defect(const Field& u, const SymmetryConfig& config, int probes);

// Orthonormal basis of the fixed-point subspace (R^N)^G: empty for j < n,
// the last N-4n coordinate axes for j = n.
std::vector<Point> fixed_subspace(const SymmetryConfig& config);

// Component of x in the fixed subspace (the zero vector when it is {0}).
Point fixed_component(const SymmetryConfig& config, std::span<const double> x);

struct HypothesisReport {
    bool s1_pass = false;  // orbits are infinite or singletons (sampled)
    bool s2_pass = false;  // phi surjective: a sign -1 element exists
    bool s3_pass = false;  // stabilizer of the witness lies in ker phi
    Point s3_witness;
    int s3_stabilizer_hits = 0;
    std::string failure;  // names the witness on the first violated check

    bool all_pass() const { return s1_pass && s2_pass && s3_pass; }
};

HypothesisReport check_hypotheses(const SymmetryConfig& config, int trials);

struct SeparatedOrbit {
    std::vector<GroupElement> elements;  // m rotations 2*pi*k/m
    double delta = 0.0;                  // min pairwise separation, > 0
};

// m group elements moving x pairwise at least delta >= 2|z| sin(pi/m) apart,
// rotating in the first block (or orthogonal plane) where x has a nonzero
// component.  Throws if x is a fixed point.
SeparatedOrbit separate_orbit(std::span<const double> x, int m, const SymmetryConfig& config);

struct DistinctnessWitness {
    Point x;        // scan point with |u(x)| > tol
    Point x_prime;  // rho applied in the last block of the finer symmetry
    double margin;  // max(|u-v|(x), |u-v|(x_prime))
};

// Lemma-style distinctness: u phi_i-equivariant, v phi_j-equivariant, i < j.
// Returns the best witness or nullopt when no scanned point separates them.
std::optional<DistinctnessWitness> distinctness_witness(const Field& u,
                                                        const SymmetryConfig& config_u,
                                                        const Field& v,
                                                        const SymmetryConfig& config_v,
                                                        double tol);

// Probes mask-body membership invariance under random group elements.
bool mask_symmetric_under_group(const Grid& grid, const SymmetryConfig& config,
                                int trials = 64);

}  // namespace plap
