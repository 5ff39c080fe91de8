#include "sol/semantics.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace sol {

bool operator==(const GroundSignature& a, const GroundSignature& b) { return a.dom == b.dom && a.cod == b.cod; }

std::string to_string(const GroundSignature& s) { return to_string(s.dom) + " -> " + to_string(s.cod); }

void QuantumStructure::define(ConstInterpretation c) {
  const std::string name = c.decl->name;
  constants[name] = std::move(c);
}

const ConstInterpretation& QuantumStructure::interpretation(const std::string& name) const {
  const auto it = constants.find(name);
  if (it == constants.end()) throw EvalError("operator constant '" + name + "' has no interpretation");
  return it->second;
}

OpConstPtr QuantumStructure::constant(const std::string& name) const { return interpretation(name).decl; }

std::string to_string(PredicateKind k) {
  switch (k) {
    case PredicateKind::PureState:
      return "pure";
    case PredicateKind::MixedState:
      return "mixed";
    case PredicateKind::Unitary:
      return "unitary";
    case PredicateKind::Observable:
      return "obs";
  }
  return "?";
}

namespace {

constexpr int kMaxUnrollDepth = 256;

/// One traversal serves both signing (compute = false) and evaluation.
class Walker {
 public:
  Walker(const QuantumStructure& qs, const State& sigma, const Valuation* eta, bool compute)
      : qs_(qs), sigma_(sigma), eta_(eta), compute_(compute) {}

  Matrix walk(const FormalOp& a, int depth = 0) {
    return std::visit([&](const auto& x) { return this->on(x, depth); }, a.node().v);
  }

 private:
  const Structure& cs() const { return qs_.classical; }

  std::vector<GroundRef> ground_distinct(const RegisterString& rs, const char* rule, const std::string& what) {
    if (!satisfies(cs(), sigma_, distinctness_formula(rs)))
      throw SigningError(rule, what + ": registers " + to_string(ground_string(cs(), sigma_, rs)) + " are not distinct");
    return ground_string(cs(), sigma_, rs);
  }

  std::size_t capped_dim(const std::vector<GroundRef>& gs) const {
    std::size_t d = 1;
    for (const auto& g : gs) {
      d *= dim_of_type(g.value_type(), qs_.range());
      if (d > qs_.max_dim)
        throw ResourceError("dimension of " + to_string(gs) + " exceeds the cap of " + std::to_string(qs_.max_dim));
    }
    return d;
  }

  Matrix shell(std::vector<GroundRef> rows, std::vector<GroundRef> cols) {
    Matrix m{CMatrix(), std::move(rows), std::move(cols)};
    if (compute_) {
      const auto r = capped_dim(m.rows);
      const auto c = capped_dim(m.cols);
      m.data = CMatrix::Zero(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
    return m;
  }

  Complex scalar_value(const Expr& c) { return as_complex(eval_expr(cs(), sigma_, c)); }

  Matrix on(const ScalarOp& x, int) {
    Matrix m = shell({}, {});
    if (compute_) m.data(0, 0) = scalar_value(x.c);
    return m;
  }

  Matrix on(const KetOp& x, int) {
    Matrix m = shell({ground(cs(), sigma_, x.reg)}, {});
    if (compute_) {
      const auto i = basis_index(eval_expr(cs(), sigma_, x.label), x.reg.value_type(), qs_.range(), qs_.tol());
      m.data(static_cast<Eigen::Index>(i), 0) = 1.0;
    }
    return m;
  }

  Matrix on(const BraOp& x, int) {
    Matrix m = shell({}, {ground(cs(), sigma_, x.reg)});
    if (compute_) {
      const auto i = basis_index(eval_expr(cs(), sigma_, x.label), x.reg.value_type(), qs_.range(), qs_.tol());
      m.data(0, static_cast<Eigen::Index>(i)) = 1.0;
    }
    return m;
  }

  Matrix on(const VarOp& x, int) {
    auto dom = ground_distinct(x.sig.dom, "Sign-OpV", x.decl->name);
    auto cod = ground_distinct(x.sig.cod, "Sign-OpV", x.decl->name);
    Matrix m{CMatrix(), std::move(dom), std::move(cod)};
    if (compute_) {
      const auto it = eta_ ? eta_->find(x.decl->name) : Valuation::const_iterator{};
      if (!eta_ || it == eta_->end()) throw EvalError("operator variable '" + x.decl->name + "' has no value");
      const auto r = capped_dim(m.rows);
      const auto c = capped_dim(m.cols);
      if (static_cast<std::size_t>(it->second.rows()) != r || static_cast<std::size_t>(it->second.cols()) != c)
        throw EvalError("value of '" + x.decl->name + "' has shape " + std::to_string(it->second.rows()) + "x" +
                        std::to_string(it->second.cols()) + ", expected " + std::to_string(r) + "x" +
                        std::to_string(c));
      m.data = it->second;
    }
    return m;
  }

  Matrix on(const ConstOp& x, int) {
    GroundSignature g{ground_distinct(x.sig.dom, "Sign-OpC", x.decl->name),
                      ground_distinct(x.sig.cod, "Sign-OpC", x.decl->name)};
    const auto& interp = qs_.interpretation(x.decl->name);
    std::vector<Value> params;
    params.reserve(x.params.size());
    for (const auto& p : x.params) params.push_back(eval_expr(cs(), sigma_, p));
    if (interp.validate)
      if (auto err = interp.validate(params, g)) throw SigningError("Sign-OpC", x.decl->name + ": " + *err);
    Matrix m{CMatrix(), g.dom, g.cod};
    if (compute_) {
      const auto r = capped_dim(m.rows);
      const auto c = capped_dim(m.cols);
      m.data = interp.matrix(params, g, qs_.range());
      if (static_cast<std::size_t>(m.data.rows()) != r || static_cast<std::size_t>(m.data.cols()) != c)
        throw EvalError("interpretation of '" + x.decl->name + "' has the wrong shape");
    }
    return m;
  }

  Matrix on(const ScaleOp& x, int depth) {
    Matrix m = walk(x.a, depth);
    if (compute_) m.data *= scalar_value(x.c);
    return m;
  }

  Matrix on(const AdjointOp& x, int depth) {
    Matrix m = walk(x.a, depth);
    std::swap(m.rows, m.cols);
    if (compute_) m.data = m.data.adjoint().eval();
    return m;
  }

  Matrix on(const SumOp& x, int depth) {
    Matrix l = walk(x.a, depth);
    Matrix r = walk(x.b, depth);
    if (!same_register_set(l.rows, r.rows) || !same_register_set(l.cols, r.cols))
      throw SigningError("Sign-Add", "summands have signatures " + to_string(GroundSignature{l.rows, l.cols}) +
                                         " and " + to_string(GroundSignature{r.rows, r.cols}));
    if (compute_) {
      r = with_col_order(with_row_order(r, l.rows, qs_.range()), l.cols, qs_.range());
      l.data += r.data;
    }
    return l;
  }

  Matrix on(const ProductOp& x, int depth) {
    Matrix l = walk(x.a, depth);
    Matrix r = walk(x.b, depth);
    if (!same_register_set(l.cols, r.rows))
      throw SigningError("Sign-Mult", "left factor has codomain " + to_string(l.cols) +
                                          " but right factor has domain " + to_string(r.rows));
    Matrix m{CMatrix(), l.rows, r.cols};
    if (compute_) m.data = l.data * with_row_order(r, l.cols, qs_.range()).data;
    return m;
  }

  Matrix on(const TensorOp& x, int depth) {
    Matrix l = walk(x.a, depth);
    Matrix r = walk(x.b, depth);
    if (overlaps(l.rows, r.rows) || overlaps(l.cols, r.cols))
      throw SigningError("Sign-Tensor", "factors share registers: " + to_string(GroundSignature{l.rows, l.cols}) +
                                            " and " + to_string(GroundSignature{r.rows, r.cols}));
    std::vector<GroundRef> rows = l.rows;
    rows.insert(rows.end(), r.rows.begin(), r.rows.end());
    std::vector<GroundRef> cols = l.cols;
    cols.insert(cols.end(), r.cols.begin(), r.cols.end());
    Matrix m{CMatrix(), std::move(rows), std::move(cols)};
    if (compute_) {
      capped_dim(m.rows);
      capped_dim(m.cols);
      m.data = kron(l.data, r.data);
    }
    return m;
  }

  Matrix on(const CallOp& x, int depth) {
    if (depth >= kMaxUnrollDepth) throw ResourceError("recursion depth limit reached while unrolling '" + x.name + "'");
    const auto def = x.def.lock();
    if (!def) throw EvalError("recursive definition '" + x.name + "' is no longer available");
    std::vector<Value> args;
    args.reserve(x.args.size());
    for (const auto& e : x.args) args.push_back(eval_expr(cs(), sigma_, e));
    return walk(unroll(cs(), *def, args), depth + 1);
  }

  const QuantumStructure& qs_;
  const State& sigma_;
  const Valuation* eta_;
  bool compute_;
};

Matrix square_up(const QuantumStructure& qs, const Matrix& m, const char* what) {
  if (!same_register_set(m.rows, m.cols))
    throw EvalError(std::string(what) + " needs a square signature, got " + to_string(GroundSignature{m.rows, m.cols}));
  return with_col_order(m, m.rows, qs.range());
}

}  // namespace

GroundSignature check_signing(const QuantumStructure& qs, const State& sigma, const FormalOp& a) {
  Matrix m = Walker(qs, sigma, nullptr, false).walk(a);
  return {std::move(m.rows), std::move(m.cols)};
}

Matrix evaluate(const QuantumStructure& qs, const Context& ctx, const FormalOp& a) {
  return Walker(qs, ctx.sigma, &ctx.eta, true).walk(a);
}

double frobenius_norm(const QuantumStructure& qs, const Context& ctx, const FormalOp& a) {
  return evaluate(qs, ctx, a).data.norm();
}

Complex trace(const QuantumStructure& qs, const Context& ctx, const FormalOp& a) {
  return square_up(qs, evaluate(qs, ctx, a), "trace").data.trace();
}

bool is_unit_vector(const CMatrix& v, double tol) { return v.cols() == 1 && std::abs(v.norm() - 1.0) <= tol; }

bool is_hermitian(const CMatrix& m, double tol) {
  return m.rows() == m.cols() && max_abs(m - m.adjoint()) <= tol;
}

bool is_unitary(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m.adjoint() * m - CMatrix::Identity(m.rows(), m.cols())) <= tol;
}

double min_eigenvalue(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  const CMatrix h = (m + m.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw EvalError("eigenvalue computation did not converge");
  return es.eigenvalues().minCoeff();
}

bool is_density(const CMatrix& m, double tol) {
  return is_hermitian(m, tol) && min_eigenvalue(m) >= -tol && std::abs(m.trace() - Complex(1.0)) <= tol;
}

bool loewner_leq(const CMatrix& a, const CMatrix& b, double tol) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
  const CMatrix d = b - a;
  return is_hermitian(d, tol) && min_eigenvalue(d) >= -tol;
}

Judgement check_predicate(const QuantumStructure& qs, const Context& ctx, PredicateKind kind, const FormalOp& a,
                          const std::optional<RegisterString>& regs) {
  const double tol = qs.tol();
  Matrix m;
  try {
    m = evaluate(qs, ctx, a);
  } catch (const SigningError& e) {
    return Judgement::no(e.what());
  } catch (const EvalError& e) {
    return Judgement::no(e.what());
  }
  std::vector<GroundRef> target = m.rows;
  if (regs) {
    if (!satisfies(qs.classical, ctx.sigma, distinctness_formula(*regs)))
      return Judgement::no("registers " + to_string(ground_string(qs.classical, ctx.sigma, *regs)) +
                           " are not distinct");
    target = ground_string(qs.classical, ctx.sigma, *regs);
    if (!same_register_set(m.rows, target))
      return Judgement::no("operator has domain " + to_string(m.rows) + ", expected " + to_string(target));
  }
  if (kind == PredicateKind::PureState) {
    if (!m.cols.empty()) return Judgement::no("a state must have empty codomain, got " + to_string(m.cols));
    m = with_row_order(m, target, qs.range());
    if (!is_unit_vector(m.data, tol))
      return Judgement::no("norm is " + format_real(m.data.norm()) + ", not 1");
    return Judgement::yes();
  }
  if (!same_register_set(m.rows, m.cols))
    return Judgement::no("signature " + to_string(GroundSignature{m.rows, m.cols}) + " is not square");
  m = with_col_order(with_row_order(m, target, qs.range()), target, qs.range());
  switch (kind) {
    case PredicateKind::MixedState:
      if (!is_hermitian(m.data, tol)) return Judgement::no("not Hermitian");
      if (min_eigenvalue(m.data) < -tol) return Judgement::no("has a negative eigenvalue");
      if (std::abs(m.data.trace() - Complex(1.0)) > tol)
        return Judgement::no("trace is " + to_string(Value{m.data.trace()}) + ", not 1");
      return Judgement::yes();
    case PredicateKind::Unitary:
      return is_unitary(m.data, tol) ? Judgement::yes() : Judgement::no("not unitary");
    case PredicateKind::Observable:
      return is_hermitian(m.data, tol) ? Judgement::yes() : Judgement::no("not Hermitian");
    case PredicateKind::PureState:
      break;
  }
  return Judgement::yes();
}

Judgement compare(const QuantumStructure& qs, const Context& ctx, const FormalOp& a, const FormalOp& b, Relation rel) {
  const double tol = qs.tol();
  Matrix l, r;
  try {
    l = evaluate(qs, ctx, a);
    r = evaluate(qs, ctx, b);
  } catch (const SigningError& e) {
    return Judgement::no(e.what());
  } catch (const EvalError& e) {
    return Judgement::no(e.what());
  }
  if (!same_register_set(l.rows, r.rows) || !same_register_set(l.cols, r.cols))
    return Judgement::no("signatures differ: " + to_string(GroundSignature{l.rows, l.cols}) + " vs " +
                         to_string(GroundSignature{r.rows, r.cols}));
  if (rel == Relation::Loewner) {
    if (!same_register_set(l.rows, l.cols))
      return Judgement::no("order needs square signatures, got " + to_string(GroundSignature{l.rows, l.cols}));
    l = with_col_order(l, l.rows, qs.range());
  }
  r = with_col_order(with_row_order(r, l.rows, qs.range()), l.cols, qs.range());
  if (rel == Relation::Equal) {
    const double d = max_abs(l.data - r.data);
    return d <= tol ? Judgement::yes() : Judgement::no("operators differ by " + format_real(d));
  }
  const CMatrix diff = r.data - l.data;
  if (!is_hermitian(diff, tol)) return Judgement::no("difference is not Hermitian");
  const double lam = min_eigenvalue(diff);
  return lam >= -tol ? Judgement::yes() : Judgement::no("difference has eigenvalue " + format_real(lam));
}

}  // namespace sol
