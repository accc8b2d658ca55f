#include "toda/cumulants.hpp"

#include <string>

#include "toda/error.hpp"
#include "toda/symbolic_mgf.hpp"

namespace toda {

namespace {

BigRational bin(int n, int k) { return BigRational(binomial(n, k)); }

// kappa_{l+1} coefficient of the recurrence at order l
BigRational leading_coefficient(const BigRational& width, int l) {
  return (width * width - l * l) * (l + 1);
}

// everything in the recurrence at order l except the kappa_{l+1} term
BigRational recurrence_tail(const std::vector<BigRational>& k, const BigRational& width, int l) {
  BigRational acc = width * (2 * l - 1) * l * k[static_cast<std::size_t>(l)];
  acc += BigRational(l * (l - 1) * (l - 2)) * k[static_cast<std::size_t>(l - 1)];
  BigRational sum = 0;
  for (int j = 0; j < l; ++j)
    sum += BigRational((3 * j + 1) * (j - l) * (j - l)) * bin(l, j) *
           k[static_cast<std::size_t>(j + 1)] * k[static_cast<std::size_t>(l - j)];
  return acc - 2 * sum;
}

}  // namespace

std::vector<int> singular_orders(const LeadConfig& cfg, int L) {
  std::vector<int> out;
  const BigRational w = cfg.width();
  for (int l = 2; l < L; ++l)
    if (w == l) out.push_back(l);
  return out;
}

BigRational kappa1_closed(const LeadConfig& cfg) {
  return cfg.n == 0 ? BigRational(0) : BigRational(cfg.n_times_n_plus_nu() / cfg.width());
}

BigRational kappa2_closed(const LeadConfig& cfg) {
  const BigRational k1 = kappa1_closed(cfg);
  const BigRational w = cfg.width();
  return cfg.n == 0 ? BigRational(0) : BigRational(k1 * k1 / (w * w - 1));
}

BigRational kappa3_closed(const LeadConfig& cfg) {
  if (cfg.n == 0 || cfg.nu == 0) return 0;
  const BigRational k1 = kappa1_closed(cfg);
  const BigRational w = cfg.width();
  return -2 * cfg.nu * cfg.nu * k1 * k1 / (w * (w * w - 1) * (w * w - 4));
}

BigRational kappa3_quoted(const LeadConfig& cfg) {
  const BigRational k1 = kappa1_closed(cfg);
  return cfg.n == 0 ? BigRational(0) : BigRational(-cfg.nu * cfg.nu * k1 * k1 / cfg.width());
}

CumulantSeq conductance_cumulants(const LeadConfig& cfg, int L, SingularPolicy policy) {
  if (L < 1) throw DomainError("cumulant order must be at least 1");
  CumulantSeq seq;
  seq.cfg = cfg;
  seq.values.assign(static_cast<std::size_t>(std::max(L, 2) + 1), BigRational(0));
  if (cfg.n > 0) {
    auto& k = seq.values;
    const BigRational w = cfg.width();
    k[1] = kappa1_closed(cfg);
    k[2] = kappa2_closed(cfg);
    std::vector<BigRational> from_mgf;
    for (int l = 2; l < L; ++l) {
      const BigRational lead = leading_coefficient(w, l);
      const BigRational tail = recurrence_tail(k, w, l);
      if (lead != 0) {
        k[static_cast<std::size_t>(l + 1)] = -tail / lead;
        continue;
      }
      if (policy == SingularPolicy::Raise)
        throw SingularOrderError(l, "cumulant recurrence is singular at order l=" + std::to_string(l) +
                                        " ((2n+nu)^2 = l^2); kappa_" + std::to_string(l + 1) +
                                        " is not determined by it");
      if (tail != 0)
        throw ShapeError("cumulant recurrence constraint violated at singular order l=" + std::to_string(l));
      if (from_mgf.empty()) from_mgf = cumulants_from_mgf(mgf_hankel(cfg), l + 1);
      k[static_cast<std::size_t>(l + 1)] = from_mgf[static_cast<std::size_t>(l + 1)];
    }
  }
  seq.values.resize(static_cast<std::size_t>(L + 1));
  return seq;
}

BigRational cumulant_recurrence_residual(const CumulantSeq& seq, int l) {
  if (l < 2 || l + 1 > seq.order()) throw DomainError("residual order outside the sequence");
  const BigRational w = seq.cfg.width();
  return leading_coefficient(w, l) * seq[l + 1] + recurrence_tail(seq.values, w, l);
}

const FEtaPoly& JointCumulantTable::at(int l, int m) const {
  auto it = entries.find({l, m});
  if (it == entries.end())
    throw DomainError("joint cumulant (" + std::to_string(l) + "," + std::to_string(m) + ") not in table");
  return it->second;
}

JointCumulantTable joint_cumulants(const CumulantSeq& boundary, int lmax, int mmax) {
  if (lmax < 0 || mmax < 0) throw DomainError("table bounds must be non-negative");
  const int need = joint_boundary_order(lmax, mmax);
  if (boundary.order() < need)
    throw DepthError(need, "joint table (" + std::to_string(lmax) + "," + std::to_string(mmax) +
                               ") needs conductance cumulants to order " + std::to_string(need) +
                               ", have " + std::to_string(boundary.order()));
  JointCumulantTable t;
  t.cfg = boundary.cfg;
  t.lmax = lmax;
  t.mmax = mmax;
  auto& e = t.entries;
  e[{0, 0}] = FEtaPoly();
  for (int l = 1; l <= need; ++l) e[{l, 0}] = FEtaPoly::constant(boundary[l]);
  const FEtaPoly f{0, 1};
  const FEtaPoly f2{0, 0, 1};
  const FEtaPoly one_minus_f2{1, 0, -1};
  const BigRational w = t.cfg.width();
  auto get = [&](int l, int m) -> const FEtaPoly& { return e.at({l, m}); };
  for (int m = 0; m < mmax; ++m) {
    const int rows = lmax + 2 * (mmax - m - 1);
    for (int l = 0; l <= rows; ++l) {
      FEtaPoly rhs;
      if (m > 0) rhs -= BigRational(m) * (f2 * get(l + 4, m - 1) + one_minus_f2 * get(l + 2, m - 1));
      rhs += (2 * w) * (f * get(l + 2, m));
      rhs += BigRational(2 * (l + 2 * m + 1)) * get(l + 1, m);
      if (m > 0) {
        FEtaPoly conv;
        for (int i = 0; i <= m - 1; ++i)
          for (int j = 0; j <= l; ++j)
            conv += (bin(m - 1, i) * bin(l, j)) * (get(j + 2, i) * get(l - j + 2, m - i - 1));
        rhs -= BigRational(6 * m) * (f2 * conv);
      }
      e[{l, m + 1}] = rhs * make_rational(1, 2 * l + 3 * m + 2);
    }
  }
  e.erase({0, 0});
  return t;
}

JointCumulantTable joint_cumulants(const LeadConfig& cfg, int lmax, int mmax, SingularPolicy policy) {
  return joint_cumulants(conductance_cumulants(cfg, std::max(1, joint_boundary_order(lmax, mmax)), policy),
                         lmax, mmax);
}

std::map<std::pair<int, int>, BigRational> shot_limit(const JointCumulantTable& table) {
  std::map<std::pair<int, int>, BigRational> out;
  for (const auto& [key, poly] : table.entries) {
    if (poly.degree() > key.second)
      throw ShapeError("joint cumulant (" + std::to_string(key.first) + "," + std::to_string(key.second) +
                       ") exceeds degree m in f");
    out[key] = poly.coeff(key.second);
  }
  return out;
}

BigRational shot_recurrence_residual(const std::map<std::pair<int, int>, BigRational>& shot,
                                     const LeadConfig& cfg, int l, int m) {
  auto get = [&](int a, int b) -> BigRational {
    if (a == 0 && b == 0) return 0;
    auto it = shot.find({a, b});
    if (it == shot.end())
      throw DomainError("shot cumulant (" + std::to_string(a) + "," + std::to_string(b) + ") missing");
    return it->second;
  };
  BigRational r = 0;
  if (m > 0) r += BigRational(m) * (get(l + 4, m - 1) - get(l + 2, m - 1));
  r -= 2 * cfg.width() * get(l + 2, m);
  r += BigRational(2 * l + 3 * m + 2) * get(l, m + 1);
  BigRational conv = 0;
  for (int i = 0; i <= m - 1; ++i)
    for (int j = 0; j <= l; ++j) conv += bin(m - 1, i) * bin(l, j) * get(j + 2, i) * get(l - j + 2, m - i - 1);
  r += BigRational(6 * m) * conv;
  return r;
}

std::vector<BigRational> shot_cumulants_symmetric(int n, int L) {
  if (n < 1 || L < 1) throw DomainError("shot_cumulants_symmetric needs n >= 1 and L >= 1");
  const LeadConfig minus = effective_config((n + 1) / 2, make_rational(-1, 2));
  const LeadConfig plus = effective_config(n / 2, make_rational(1, 2));
  if (!singular_orders(minus, L).empty() || !singular_orders(plus, L).empty())
    throw ShapeError("half-integer asymmetry produced a singular recurrence order");
  const CumulantSeq a = conductance_cumulants(minus, L);
  const CumulantSeq b = conductance_cumulants(plus, L);
  std::vector<BigRational> out(static_cast<std::size_t>(L + 1));
  BigRational scale = 1;
  for (int l = 1; l <= L; ++l) {
    scale /= -4;
    out[static_cast<std::size_t>(l)] = scale * (a[l] + b[l]);
  }
  out[1] += make_rational(n, 4);
  return out;
}

NoisePowerClosedForms noise_power_closed_forms(const CumulantSeq& seq, int l) {
  if (seq.order() < l + 4) throw DepthError(l + 4, "closed forms need conductance cumulants to order l+4");
  const BigRational w = seq.cfg.width();
  const FEtaPoly f{0, 1};
  const FEtaPoly f2{0, 0, 1};
  NoisePowerClosedForms r;
  r.l = l;
  r.kappa_l1 = FEtaPoly::constant(seq[l + 1]) + f * (w * seq[l + 2] / (l + 1));
  r.shot_l1 = w * seq[l + 2] / (l + 1);
  BigRational conv = 0;
  for (int j = 0; j <= l; ++j) conv += bin(l, j) * seq[j + 2] * seq[l + 2 - j];
  const BigRational a4 = 2 * w * w / (l + 3) - 1;
  const BigRational d = 2 * l + 5;
  r.kappa_l2 = f2 * (a4 / d * seq[l + 4]) + f * (2 * w / (l + 2) * seq[l + 3]) +
               FEtaPoly{seq[l + 2], 0, seq[l + 2] / d} - f2 * (6 / d * conv);
  r.shot_l2 = (a4 * seq[l + 4] + seq[l + 2] - 6 * conv) / d;
  return r;
}

FEtaPoly mean_noise_power(int n_left, int n_right) {
  const BigRational prod = BigRational(n_left) * n_right;
  const BigRational sum = BigRational(n_left) + n_right;
  const BigRational thermal = prod / sum;
  return FEtaPoly{thermal, thermal * prod / (sum * sum - 1)};
}

BigRational shot_kappa1_closed(int n) {
  const BigRational q = n;
  return q * q * q / (2 * (4 * q * q - 1));
}

BigRational shot_kappa2_closed(int n) {
  const BigRational q = n;
  const BigRational q2 = q * q;
  return q2 * (4 * q2 * q2 - 9 * q2 + 3) / (8 * (4 * q2 - 1) * (4 * q2 - 1) * (4 * q2 - 9));
}

BigRational shot_kappa3_closed(int n) {
  const BigRational q = n;
  const BigRational q2 = q * q;
  const BigRational d = 4 * q2 - 1;
  return q2 * q * (4 * q2 * q2 - 13 * q2 + 6) / (4 * d * d * d * (4 * q2 - 9) * (4 * q2 - 25));
}

BigRational shot_kappa3_quoted(int n) {
  const BigRational q = n;
  const BigRational q2 = q * q;
  const BigRational d = 4 * q2 - 1;
  return q2 * (16 * q2 * q2 * q2 - 24 * q2 * q2 + 9 * q2 + 1) / (128 * d * d * d * d);
}

}  // namespace toda
