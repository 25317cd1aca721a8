#include "msladder/decompose.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <json.hpp>

namespace msl {

ComplexMatrix DecompositionReport::full_transformation() const {
  const int dim = total_dimension();
  ComplexMatrix S = ComplexMatrix::Zero(dim, dim);
  int off = 0;
  for (const auto& block : transformation.blocks) {
    S.block(off, off, block.rows(), block.cols()) = block;
    off += static_cast<int>(block.rows());
  }
  return S;
}

int DecompositionReport::total_dimension() const {
  int dim = 0;
  for (const auto& block : transformation.blocks) dim += static_cast<int>(block.rows());
  return dim;
}

std::vector<double> interior_commutator_residuals(const LadderSystem& system,
                                                  const Tolerances& tol) {
  const ValidationReport vr = validate(system);
  if (!vr.ok()) throw InvalidSystem("interior_commutator_residuals: " + vr.summary());
  std::vector<double> residuals;
  const int n_levels = static_cast<int>(system.levels.size());
  for (int k = 1; k + 1 < n_levels; ++k) {
    const ComplexMatrix& Vlo = system.transitions[k - 1].constant_part;
    const ComplexMatrix& Vhi = system.transitions[k].constant_part;
    residuals.push_back(
        commutator_residual(Vlo.adjoint() * Vlo, Vhi * Vhi.adjoint(), tol));
  }
  return residuals;
}

namespace {

// Greedy Gram-Schmidt completion of an orthonormal column set to a full basis.
// Picks the standard basis vector with the largest residual each round, which
// keeps the construction well conditioned and deterministic.
ComplexMatrix orthonormal_completion(const ComplexMatrix& cols, int dim) {
  const int have = static_cast<int>(cols.cols());
  const int want = dim - have;
  ComplexMatrix out(dim, want);
  std::vector<ComplexVector> acc;
  acc.reserve(dim);
  for (int c = 0; c < have; ++c) acc.push_back(cols.col(c));
  std::vector<bool> used(dim, false);

  for (int add = 0; add < want; ++add) {
    int best = -1;
    double best_norm = -1.0;
    ComplexVector best_v;
    for (int i = 0; i < dim; ++i) {
      if (used[i]) continue;
      ComplexVector v = ComplexVector::Zero(dim);
      v[i] = 1.0;
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& a : acc) v -= a * a.dot(v);
      }
      const double nv = v.norm();
      if (nv > best_norm) {
        best = i;
        best_norm = nv;
        best_v = std::move(v);
      }
    }
    used[best] = true;
    best_v /= best_norm;
    canonicalize_phase(best_v);
    out.col(add) = best_v;
    acc.push_back(std::move(best_v));
  }
  return out;
}

struct RawLink {
  int transition = 0;
  int from = 0;  // MS index within level `transition`
  int to = 0;    // MS index within level `transition + 1`
  double value = 0.0;
};

struct ChainDraft {
  std::vector<std::pair<int, int>> members;  // (level, temporary MS index)
  std::vector<double> lambdas;
};

bool chain_before(const ChainDraft& a, const ChainDraft& b) {
  if (a.members.size() != b.members.size()) return a.members.size() > b.members.size();
  if (a.members.front().first != b.members.front().first) {
    return a.members.front().first < b.members.front().first;
  }
  for (std::size_t i = 0; i < a.lambdas.size(); ++i) {
    if (a.lambdas[i] != b.lambdas[i]) return a.lambdas[i] > b.lambdas[i];
  }
  return a.members.front().second < b.members.front().second;
}

// Shared tail of decompose/decompose_two_level: extract chains from the
// transformed blocks, order states canonically (darks first, brights in chain
// order), and assemble the report.
DecompositionReport finalize_report(std::vector<ComplexMatrix> basis,  // columns
                                    const std::vector<ComplexMatrix>& couplings,
                                    const std::vector<std::string>& envelope_ids,
                                    const std::vector<double>& detunings,
                                    std::vector<double> residuals,
                                    const Tolerances& tol) {
  const int n_levels = static_cast<int>(basis.size());
  std::vector<int> dims(n_levels);
  for (int k = 0; k < n_levels; ++k) dims[k] = static_cast<int>(basis[k].cols());

  // Transformed blocks and their nonzero structure.
  std::vector<ComplexMatrix> ms(n_levels - 1);
  std::vector<RawLink> links;
  std::vector<std::vector<int>> up(n_levels), down(n_levels);
  for (int k = 0; k < n_levels; ++k) {
    up[k].assign(dims[k], -1);
    down[k].assign(dims[k], -1);
  }

  for (int n = 0; n < n_levels - 1; ++n) {
    ms[n] = basis[n].adjoint() * couplings[n] * basis[n + 1];
    const double thr = tol.null_link * std::max(couplings[n].norm(), tol.abs_floor);
    const double scale = std::max(couplings[n].norm(), tol.abs_floor);
    for (int i = 0; i < dims[n]; ++i) {
      for (int j = 0; j < dims[n + 1]; ++j) {
        const double a = std::abs(ms[n](i, j));
        if (a <= thr) continue;
        if (up[n][i] >= 0) {
          throw NotDecomposable(
              "decompose: transformed coupling block " + std::to_string(n) +
                  " is not diagonal up to permutation (row conflict)",
              n, a / scale);
        }
        if (down[n + 1][j] >= 0) {
          throw NotDecomposable(
              "decompose: transformed coupling block " + std::to_string(n) +
                  " is not diagonal up to permutation (column conflict)",
              n + 1, a / scale);
        }
        up[n][i] = j;
        down[n + 1][j] = i;
        if (std::abs(ms[n](i, j).imag()) > 1e-6 * a) {
          throw Error("decompose: internal phase canonicalization failure");
        }
        links.push_back({n, i, j, a});
      }
    }
  }

  // Walk the link graph; every maximal path is one chain.
  std::vector<ChainDraft> drafts;
  for (int k = 0; k < n_levels; ++k) {
    for (int i = 0; i < dims[k]; ++i) {
      if (down[k][i] >= 0) continue;  // not a chain head
      ChainDraft draft;
      int level = k, idx = i;
      draft.members.emplace_back(level, idx);
      while (level < n_levels - 1 && up[level][idx] >= 0) {
        const int next = up[level][idx];
        draft.lambdas.push_back(std::abs(ms[level](idx, next)));
        ++level;
        idx = next;
        draft.members.emplace_back(level, idx);
      }
      drafts.push_back(std::move(draft));
    }
  }
  std::sort(drafts.begin(), drafts.end(), chain_before);

  int member_total = 0;
  for (const auto& d : drafts) member_total += static_cast<int>(d.members.size());
  if (member_total != std::accumulate(dims.begin(), dims.end(), 0)) {
    throw Error("decompose: internal chain bookkeeping failure");
  }

  // Canonical state order per level: dark states first, bright states in
  // chain order. order[k][new index] = temporary index.
  std::vector<std::vector<int>> order(n_levels);
  for (const auto& d : drafts) {
    if (d.members.size() == 1) order[d.members.front().first].push_back(d.members.front().second);
  }
  for (const auto& d : drafts) {
    if (d.members.size() == 1) continue;
    for (const auto& [level, idx] : d.members) order[level].push_back(idx);
  }
  std::vector<std::vector<int>> position(n_levels);
  for (int k = 0; k < n_levels; ++k) {
    position[k].assign(dims[k], -1);
    ComplexMatrix permuted(basis[k].rows(), dims[k]);
    for (int m = 0; m < dims[k]; ++m) {
      position[k][order[k][m]] = m;
      permuted.col(m) = basis[k].col(order[k][m]);
    }
    basis[k] = std::move(permuted);
  }

  DecompositionReport report;
  report.commutator_residuals = std::move(residuals);
  report.transformation.blocks.reserve(n_levels);
  for (int k = 0; k < n_levels; ++k) {
    report.transformation.blocks.push_back(basis[k].adjoint());
  }

  report.coupling_blocks.resize(n_levels - 1);
  for (int n = 0; n < n_levels - 1; ++n) {
    report.coupling_blocks[n].matrix = basis[n].adjoint() * couplings[n] * basis[n + 1];
    report.coupling_blocks[n].envelope_id = envelope_ids[n];
  }
  for (const RawLink& link : links) {
    report.coupling_blocks[link.transition].lambda.push_back(
        {link.value, position[link.transition][link.from],
         position[link.transition + 1][link.to]});
  }
  for (auto& block : report.coupling_blocks) {
    std::sort(block.lambda.begin(), block.lambda.end(),
              [](const LambdaLink& a, const LambdaLink& b) { return a.row < b.row; });
  }

  for (const auto& d : drafts) {
    Chain chain;
    for (const auto& [level, idx] : d.members) {
      chain.members.emplace_back(level, position[level][idx]);
      chain.detunings.push_back(detunings[level]);
    }
    chain.link_couplings = d.lambdas;
    for (std::size_t i = 0; i + 1 < d.members.size(); ++i) {
      chain.link_envelopes.push_back(envelope_ids[d.members[i].first]);
    }
    report.census[chain.length()] += 1;
    report.chains.push_back(std::move(chain));
  }
  return report;
}

}  // namespace

DecompositionReport decompose(const LadderSystem& system, const Tolerances& tol) {
  const ValidationReport vr = validate(system);
  if (!vr.ok()) throw InvalidSystem("decompose: " + vr.summary());

  const int n_levels = static_cast<int>(system.levels.size());
  std::vector<int> dims(n_levels);
  std::vector<double> detunings(n_levels);
  for (int k = 0; k < n_levels; ++k) {
    dims[k] = system.levels[k].degeneracy;
    detunings[k] = system.levels[k].detuning;
  }
  std::vector<ComplexMatrix> V(n_levels - 1);
  std::vector<std::string> envelope_ids(n_levels - 1);
  for (int n = 0; n < n_levels - 1; ++n) {
    V[n] = system.transitions[n].constant_part;
    envelope_ids[n] = system.transitions[n].envelope_id;
  }

  // Commutation gate on the constant parts; envelopes factor out.
  std::vector<double> residuals = interior_commutator_residuals(system, tol);
  for (int k = 1; k + 1 < n_levels; ++k) {
    const double r = residuals[k - 1];
    if (r > tol.commute) {
      std::ostringstream os;
      os << "decompose: interaction products at interior level " << k
         << " do not commute (scaled residual " << r << ")";
      throw NotDecomposable(os.str(), k, r);
    }
  }

  std::vector<ComplexMatrix> basis(n_levels);  // columns are MS kets

  // Interior levels: common eigenbasis of the intensity matrices of the two
  // adjacent transitions, primary order descending in the lower one.
  for (int k = 1; k + 1 < n_levels; ++k) {
    const ComplexMatrix A = V[k - 1].adjoint() * V[k - 1];
    const ComplexMatrix B = V[k] * V[k].adjoint();
    try {
      basis[k] = simultaneous_diagonalize({A, B}, tol).adjoint();
    } catch (const NotCommuting& e) {
      throw NotDecomposable(std::string("decompose: ") + e.what(), k,
                            residuals[k - 1]);
    }
  }
  if (n_levels == 2) {
    basis[1] = hermitian_eigensystem(V[0].adjoint() * V[0], tol).eigenvectors;
  }

  // Make links between adjacent interior levels real positive by absorbing
  // phases into the higher level, left to right.
  for (int n = 1; n + 2 < n_levels; ++n) {
    const ComplexMatrix M = basis[n].adjoint() * V[n] * basis[n + 1];
    const double thr = tol.null_link * std::max(V[n].norm(), tol.abs_floor);
    for (int j = 0; j < dims[n + 1]; ++j) {
      Eigen::Index imax = 0;
      const double a = M.col(j).cwiseAbs().maxCoeff(&imax);
      if (a <= thr) continue;
      basis[n + 1].col(j) *= std::conj(M(imax, j)) / a;
    }
  }

  // End levels: bright partners of the adjacent interior states, dark
  // completion orthonormal to them.
  auto build_end = [&](int level, const ComplexMatrix& map_from_interior,
                       double link_scale) {
    const int dim = dims[level];
    const double thr = tol.null_link * std::max(link_scale, tol.abs_floor);
    ComplexMatrix partners(dim, 0);
    for (Eigen::Index j = 0; j < map_from_interior.cols(); ++j) {
      ComplexVector w = map_from_interior.col(j);
      const double lam = w.norm();
      if (lam <= thr) continue;
      partners.conservativeResize(Eigen::NoChange, partners.cols() + 1);
      partners.col(partners.cols() - 1) = w / lam;
    }
    ComplexMatrix full(dim, dim);
    full.leftCols(partners.cols()) = partners;
    if (partners.cols() < dim) {
      full.rightCols(dim - partners.cols()) = orthonormal_completion(partners, dim);
    }
    basis[level] = std::move(full);
  };
  build_end(0, V[0] * basis[1], V[0].norm());
  if (n_levels > 2) {
    build_end(n_levels - 1, V[n_levels - 2].adjoint() * basis[n_levels - 2],
              V[n_levels - 2].norm());
  }

  return finalize_report(std::move(basis), V, envelope_ids, detunings,
                         std::move(residuals), tol);
}

DecompositionReport decompose_two_level(const ComplexMatrix& V, double detuning,
                                        const Tolerances& tol) {
  if (V.rows() < 1 || V.cols() < 1) {
    throw DimensionMismatch("decompose_two_level: empty coupling matrix");
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(V, Eigen::ComputeFullU | Eigen::ComputeFullV);
  ComplexMatrix U = svd.matrixU();
  ComplexMatrix W = svd.matrixV();
  const RealVector& sigma = svd.singularValues();
  const double thr = tol.null_link * std::max(V.norm(), tol.abs_floor);

  int rank = 0;
  while (rank < sigma.size() && sigma[rank] > thr) ++rank;

  // Joint phase canonicalization keeps U^dag V W diagonal real nonnegative.
  for (int k = 0; k < rank; ++k) {
    ComplexVector w = W.col(k);
    canonicalize_phase(w);
    const Complex ph = W.col(k).dot(w) / static_cast<double>(W.col(k).squaredNorm());
    W.col(k) = w;
    U.col(k) *= ph;
  }
  for (Eigen::Index k = rank; k < U.cols(); ++k) canonicalize_phase(U.col(k));
  for (Eigen::Index k = rank; k < W.cols(); ++k) canonicalize_phase(W.col(k));

  std::vector<ComplexMatrix> basis = {std::move(U), std::move(W)};
  return finalize_report(std::move(basis), {V}, {""}, {0.0, detuning}, {}, tol);
}

ComplexMatrix ms_hamiltonian(const DecompositionReport& report,
                             const LadderSystem& system, double t) {
  const ComplexMatrix S = report.full_transformation();
  const ComplexMatrix H = assemble_hamiltonian(system, t);
  if (S.rows() != H.rows()) {
    throw DimensionMismatch("ms_hamiltonian: report does not match system dimension");
  }
  return S * H * S.adjoint();
}

ComplexMatrix chain_hamiltonian(const Chain& chain, const LadderSystem& system, double t) {
  const int L = chain.length();
  ComplexMatrix H = ComplexMatrix::Zero(L, L);
  for (int i = 0; i < L; ++i) H(i, i) = chain.detunings[i];
  for (int i = 0; i + 1 < L; ++i) {
    const double v =
        chain.link_couplings[i] * system.envelope_value(chain.link_envelopes[i], t);
    H(i, i + 1) = v;
    H(i + 1, i) = v;
  }
  return H;
}

TransitionRanks generic_ranks(const std::vector<int>& degeneracies) {
  if (degeneracies.size() != 3) {
    throw DimensionMismatch("generic_ranks: expected three degeneracies");
  }
  TransitionRanks ranks;
  ranks.lower = std::min(degeneracies[0], degeneracies[1]);
  ranks.upper = std::min(degeneracies[1], degeneracies[2]);
  ranks.joint = std::min(ranks.lower, ranks.upper);
  return ranks;
}

Census chain_census(const std::vector<int>& degeneracies, const TransitionRanks& ranks) {
  if (degeneracies.size() != 3) {
    throw DimensionMismatch("chain_census: expected three degeneracies");
  }
  const int na = degeneracies[0], nb = degeneracies[1], nc = degeneracies[2];
  const bool ranks_ok = ranks.joint >= 0 && ranks.lower >= ranks.joint &&
                        ranks.upper >= ranks.joint &&
                        ranks.lower <= std::min(na, nb) &&
                        ranks.upper <= std::min(nb, nc) &&
                        nb - ranks.lower - ranks.upper + ranks.joint >= 0;
  if (!ranks_ok) throw DimensionMismatch("chain_census: inconsistent rank data");

  const int three = ranks.joint;
  const int two = (ranks.lower - ranks.joint) + (ranks.upper - ranks.joint);
  const int dark = (na - ranks.lower) + (nb - ranks.lower - ranks.upper + ranks.joint) +
                   (nc - ranks.upper);
  Census census;
  if (three > 0) census[3] = three;
  if (two > 0) census[2] = two;
  if (dark > 0) census[1] = dark;
  return census;
}

Census generic_chain_census(const std::vector<int>& degeneracies) {
  return chain_census(degeneracies, generic_ranks(degeneracies));
}

QuasiReduction quasi_two_level_reduce(const LadderSystem& system, const Tolerances& tol) {
  const ValidationReport vr = validate(system);
  if (!vr.ok()) throw InvalidSystem("quasi_two_level_reduce: " + vr.summary());

  const int n_levels = static_cast<int>(system.levels.size());
  const std::string& envelope_id = system.transitions.front().envelope_id;
  for (std::size_t n = 1; n < system.transitions.size(); ++n) {
    if (system.transitions[n].envelope_id != envelope_id) {
      throw PreconditionFailed(
          "quasi_two_level_reduce: envelope: transition " + std::to_string(n) +
          " uses '" + system.transitions[n].envelope_id + "' instead of '" +
          envelope_id + "'");
    }
  }
  const double upper_detuning = n_levels > 1 ? system.levels[1].detuning : 0.0;
  for (int k = 2; k < n_levels; ++k) {
    const double d = system.levels[k].detuning;
    if (k % 2 == 0) {
      if (d != 0.0) {
        throw PreconditionFailed("quasi_two_level_reduce: resonance: level " +
                                 std::to_string(k) + " detuning must vanish");
      }
    } else if (std::abs(d - upper_detuning) >
               1e-12 * std::max(1.0, std::abs(upper_detuning))) {
      throw PreconditionFailed("quasi_two_level_reduce: resonance: level " +
                               std::to_string(k) +
                               " detuning differs from level 1");
    }
  }

  // Offsets of each level inside its parity group.
  std::vector<int> group_offset(n_levels, 0);
  int na = 0, nb = 0;
  std::string label_even, label_odd;
  for (int k = 0; k < n_levels; ++k) {
    int& size = (k % 2 == 0) ? na : nb;
    std::string& label = (k % 2 == 0) ? label_even : label_odd;
    group_offset[k] = size;
    size += system.levels[k].degeneracy;
    if (!label.empty()) label += "+";
    label += system.levels[k].label;
  }

  ComplexMatrix G = ComplexMatrix::Zero(na, nb);
  for (int n = 0; n < n_levels - 1; ++n) {
    const ComplexMatrix& Vn = system.transitions[n].constant_part;
    if (n % 2 == 0) {
      G.block(group_offset[n], group_offset[n + 1], Vn.rows(), Vn.cols()) = Vn;
    } else {
      G.block(group_offset[n + 1], group_offset[n], Vn.cols(), Vn.rows()) = Vn.adjoint();
    }
  }

  QuasiReduction out;
  out.merged.levels = {{label_even, na, 0.0}, {label_odd, nb, upper_detuning}};
  out.merged.transitions.push_back({G, envelope_id, G.norm() == 0.0});
  out.merged.envelopes[envelope_id] = system.envelopes.at(envelope_id);

  out.merged_index.resize(system.total_dimension());
  for (int k = 0; k < n_levels; ++k) {
    const int off = system.level_offset(k);
    for (int i = 0; i < system.levels[k].degeneracy; ++i) {
      out.merged_index[off + i] =
          (k % 2 == 0) ? group_offset[k] + i : na + group_offset[k] + i;
    }
  }

  out.report = decompose_two_level(G, upper_detuning, tol);
  for (auto& block : out.report.coupling_blocks) block.envelope_id = envelope_id;
  for (auto& chain : out.report.chains) {
    for (auto& id : chain.link_envelopes) id = envelope_id;
  }
  return out;
}

namespace {

nlohmann::json matrix_to_json(const ComplexMatrix& M) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      row.push_back({M(i, j).real(), M(i, j).imag()});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string report_to_json(const DecompositionReport& report) {
  nlohmann::json doc;
  doc["transformation"]["blocks"] = nlohmann::json::array();
  for (const auto& block : report.transformation.blocks) {
    doc["transformation"]["blocks"].push_back(matrix_to_json(block));
  }
  doc["coupling_blocks"] = nlohmann::json::array();
  for (const auto& block : report.coupling_blocks) {
    nlohmann::json jb;
    jb["matrix"] = matrix_to_json(block.matrix);
    jb["envelope"] = block.envelope_id;
    jb["lambda"] = nlohmann::json::array();
    for (const auto& link : block.lambda) {
      jb["lambda"].push_back({{"value", link.value}, {"row", link.row}, {"col", link.col}});
    }
    doc["coupling_blocks"].push_back(std::move(jb));
  }
  doc["chains"] = nlohmann::json::array();
  for (const auto& chain : report.chains) {
    nlohmann::json jc;
    jc["members"] = nlohmann::json::array();
    for (const auto& [level, index] : chain.members) {
      jc["members"].push_back({{"level", level}, {"index", index}});
    }
    jc["link_couplings"] = chain.link_couplings;
    jc["link_envelopes"] = chain.link_envelopes;
    jc["detunings"] = chain.detunings;
    doc["chains"].push_back(std::move(jc));
  }
  doc["census"] = nlohmann::json::object();
  for (const auto& [length, count] : report.census) {
    doc["census"][std::to_string(length)] = count;
  }
  doc["commutator_residuals"] = report.commutator_residuals;
  return doc.dump(2);
}

}  // namespace msl
