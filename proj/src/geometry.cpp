// Copyright 2026 The torsiongeo Authors
// SPDX-License-Identifier: Apache-2.0

#include "torsiongeo/geometry.hpp"

#include <cmath>
#include <mutex>

#include "torsiongeo/error.hpp"

namespace torsiongeo {

namespace {

void check_point(const TriadField& triad, const Point& q) {
  if (q.size() != triad.dimension()) {
    fail(ErrorKind::ValidationError, "point has " + std::to_string(q.size()) + " coordinates, geometry " +
                                         triad.name() + " needs " + std::to_string(triad.dimension()));
  }
  for (int a = 0; a < q.size(); ++a) {
    if (!std::isfinite(q[a])) fail(ErrorKind::ValidationError, "point coordinate is not finite");
  }
}

}  // namespace

MetricData induced_metric(const TriadField& triad, const Point& q) {
  check_point(triad, q);
  MetricData m;
  m.e = triad.eval(q);
  m.g = m.e.transpose() * m.e;
  // Exact symmetry regardless of rounding in the product.
  m.g = 0.5 * (m.g + m.g.transpose()).eval();
  m.det_g = m.g.determinant();
  m.sqrt_g = m.det_g > 0.0 ? std::sqrt(m.det_g) : 0.0;
  if (m.e.rows() == m.e.cols()) m.sqrt_g = std::abs(m.e.determinant());
  if (!(m.sqrt_g >= triad.singular_threshold())) {
    fail(ErrorKind::SingularTriad, triad.name() + " triad is singular at the queried point");
  }
  m.g_inv = m.g.inverse();
  m.g_inv = 0.5 * (m.g_inv + m.g_inv.transpose()).eval();
  if (m.e.rows() == m.e.cols()) {
    m.e_inv = m.e.inverse();
  } else {
    m.e_inv = m.g_inv * m.e.transpose();
  }
  return m;
}

Matrix reciprocal_triad(const TriadField& triad, const Point& q) { return induced_metric(triad, q).e_inv; }

Tensor lower_last(const Tensor& t, const Matrix& g) {
  const int d = static_cast<int>(g.rows());
  Tensor out = t;
  const std::size_t blocks = t.size() / static_cast<std::size_t>(d);
  for (std::size_t b = 0; b < blocks; ++b) {
    for (int lam = 0; lam < d; ++lam) {
      double s = 0.0;
      for (int k = 0; k < d; ++k) s += t.data()[b * d + k] * g(k, lam);
      out.data()[b * d + lam] = s;
    }
  }
  return out;
}

Tensor raise_last(const Tensor& t, const Matrix& g_inv) { return lower_last(t, g_inv); }

ConnectionData connection_bundle(const TriadField& triad, const Point& q) {
  ConnectionData c;
  c.metric = induced_metric(triad, q);
  const MetricData& m = c.metric;
  const int d = triad.dimension();
  const int n = triad.flat_dimension();
  c.de = triad.d_eval(q);
  c.torsion_defined = triad.torsion_defined();

  c.dg = Tensor({d, d, d});
  for (int mu = 0; mu < d; ++mu) {
    for (int nu = 0; nu < d; ++nu) {
      for (int lam = 0; lam < d; ++lam) {
        double s = 0.0;
        for (int i = 0; i < n; ++i) s += c.de(i, mu, lam) * m.e(i, nu) + m.e(i, mu) * c.de(i, nu, lam);
        c.dg(mu, nu, lam) = s;
      }
    }
  }

  // d_lam e_i^mu = -(g^-1 d_lam g g^-1 e^T)^mu_i + (g^-1 d_lam e^T)^mu_i.
  c.d_e_inv = Tensor({d, n, d});
  for (int lam = 0; lam < d; ++lam) {
    Matrix dg_l(d, d), de_l(n, d);
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) dg_l(a, b) = c.dg(a, b, lam);
    }
    for (int i = 0; i < n; ++i) {
      for (int a = 0; a < d; ++a) de_l(i, a) = c.de(i, a, lam);
    }
    const Matrix der = -m.g_inv * dg_l * m.e_inv + m.g_inv * de_l.transpose();
    for (int mu = 0; mu < d; ++mu) {
      for (int i = 0; i < n; ++i) c.d_e_inv(mu, i, lam) = der(mu, i);
    }
  }

  c.gamma = Tensor({d, d, d});
  c.gamma_alt = Tensor({d, d, d});
  for (int mu = 0; mu < d; ++mu) {
    for (int nu = 0; nu < d; ++nu) {
      for (int lam = 0; lam < d; ++lam) {
        double s = 0.0, s_alt = 0.0;
        for (int i = 0; i < n; ++i) {
          s += m.e_inv(lam, i) * c.de(i, nu, mu);
          s_alt -= m.e(i, nu) * c.d_e_inv(lam, i, mu);
        }
        c.gamma(mu, nu, lam) = s;
        c.gamma_alt(mu, nu, lam) = s_alt;
      }
    }
  }

  Tensor first_kind({d, d, d});
  for (int mu = 0; mu < d; ++mu) {
    for (int nu = 0; nu < d; ++nu) {
      for (int lam = 0; lam < d; ++lam) {
        first_kind(mu, nu, lam) = 0.5 * (c.dg(nu, lam, mu) + c.dg(mu, lam, nu) - c.dg(mu, nu, lam));
      }
    }
  }
  c.christoffel = raise_last(first_kind, m.g_inv);

  c.torsion = Tensor({d, d, d});
  c.torsion_vector = Vector::Zero(d);
  c.contortion = Tensor({d, d, d});
  if (!c.torsion_defined) {
    // The square-root triad of a bare metric is a gauge choice; use the
    // Riemannian connection throughout.
    c.gamma = c.christoffel;
    c.gamma_alt = c.christoffel;
    return c;
  }
  for (int mu = 0; mu < d; ++mu) {
    for (int nu = 0; nu < d; ++nu) {
      for (int lam = 0; lam < d; ++lam) {
        c.torsion(mu, nu, lam) = 0.5 * (c.gamma(mu, nu, lam) - c.gamma(nu, mu, lam));
      }
    }
  }
  for (int mu = 0; mu < d; ++mu) {
    for (int lam = 0; lam < d; ++lam) c.torsion_vector[mu] += c.torsion(mu, lam, lam);
  }
  const Tensor s_low = lower_last(c.torsion, m.g);
  Tensor k_low({d, d, d});
  for (int mu = 0; mu < d; ++mu) {
    for (int nu = 0; nu < d; ++nu) {
      for (int lam = 0; lam < d; ++lam) {
        k_low(mu, nu, lam) = s_low(mu, nu, lam) - s_low(nu, lam, mu) + s_low(lam, mu, nu);
      }
    }
  }
  c.contortion = raise_last(k_low, m.g_inv);
  return c;
}

CurvatureData curvature_bundle(const TriadField& triad, const Point& q, const ConnectionData& c) {
  CurvatureData k;
  const MetricData& m = c.metric;
  const int d = triad.dimension();
  const int n = triad.flat_dimension();
  k.dde = triad.dd_eval(q);

  k.ddg = Tensor({d, d, d, d});
  for (int mu = 0; mu < d; ++mu) {
    for (int nu = 0; nu < d; ++nu) {
      for (int lam = 0; lam < d; ++lam) {
        for (int sig = 0; sig < d; ++sig) {
          double s = 0.0;
          for (int i = 0; i < n; ++i) {
            s += k.dde(i, mu, lam, sig) * m.e(i, nu) + c.de(i, mu, lam) * c.de(i, nu, sig) +
                 c.de(i, mu, sig) * c.de(i, nu, lam) + m.e(i, mu) * k.dde(i, nu, lam, sig);
          }
          k.ddg(mu, nu, lam, sig) = s;
        }
      }
    }
  }

  // d_sig Gamma_{mu nu}^lam = d_sig e_i^lam d_mu e^i_nu + e_i^lam d_sig d_mu e^i_nu
  k.d_gamma = Tensor({d, d, d, d});
  if (c.torsion_defined) {
    for (int sig = 0; sig < d; ++sig) {
      for (int mu = 0; mu < d; ++mu) {
        for (int nu = 0; nu < d; ++nu) {
          for (int lam = 0; lam < d; ++lam) {
            double s = 0.0;
            for (int i = 0; i < n; ++i) {
              s += c.d_e_inv(lam, i, sig) * c.de(i, nu, mu) + m.e_inv(lam, i) * k.dde(i, nu, mu, sig);
            }
            k.d_gamma(sig, mu, nu, lam) = s;
          }
        }
      }
    }
  }

  // Christoffel derivative: d(g^-1 G) = -g^-1 dg g^-1 G + g^-1 dG.
  Tensor first_kind({d, d, d});
  for (int mu = 0; mu < d; ++mu) {
    for (int nu = 0; nu < d; ++nu) {
      for (int lam = 0; lam < d; ++lam) {
        first_kind(mu, nu, lam) = 0.5 * (c.dg(nu, lam, mu) + c.dg(mu, lam, nu) - c.dg(mu, nu, lam));
      }
    }
  }
  k.d_christoffel = Tensor({d, d, d, d});
  for (int sig = 0; sig < d; ++sig) {
    Matrix dg_s(d, d);
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) dg_s(a, b) = c.dg(a, b, sig);
    }
    const Matrix d_ginv = -m.g_inv * dg_s * m.g_inv;
    for (int mu = 0; mu < d; ++mu) {
      for (int nu = 0; nu < d; ++nu) {
        for (int kap = 0; kap < d; ++kap) {
          double s = 0.0;
          for (int lam = 0; lam < d; ++lam) {
            const double d_first = 0.5 * (k.ddg(nu, lam, mu, sig) + k.ddg(mu, lam, nu, sig) - k.ddg(mu, nu, lam, sig));
            s += d_ginv(kap, lam) * first_kind(mu, nu, lam) + m.g_inv(kap, lam) * d_first;
          }
          k.d_christoffel(sig, mu, nu, kap) = s;
        }
      }
    }
  }
  if (!c.torsion_defined) k.d_gamma = k.d_christoffel;

  auto curvature_of = [d](const Tensor& gam, const Tensor& dgam) {
    Tensor r({d, d, d, d});
    for (int mu = 0; mu < d; ++mu) {
      for (int nu = 0; nu < d; ++nu) {
        for (int lam = 0; lam < d; ++lam) {
          for (int kap = 0; kap < d; ++kap) {
            double s = dgam(mu, nu, lam, kap) - dgam(nu, mu, lam, kap);
            for (int sg = 0; sg < d; ++sg) {
              s -= gam(mu, lam, sg) * gam(nu, sg, kap) - gam(nu, lam, sg) * gam(mu, sg, kap);
            }
            r(mu, nu, lam, kap) = s;
          }
        }
      }
    }
    return r;
  };
  k.cartan = curvature_of(c.gamma, k.d_gamma);
  k.riemann = curvature_of(c.christoffel, k.d_christoffel);

  auto contract = [&](const Tensor& r, Matrix& ricci, double& scalar, Matrix& einstein) {
    ricci = Matrix::Zero(d, d);
    for (int nu = 0; nu < d; ++nu) {
      for (int lam = 0; lam < d; ++lam) {
        for (int mu = 0; mu < d; ++mu) ricci(nu, lam) += r(mu, nu, lam, mu);
      }
    }
    scalar = (m.g_inv.cwiseProduct(ricci)).sum();
    einstein = ricci - 0.5 * scalar * m.g;
  };
  contract(k.cartan, k.ricci, k.scalar, k.einstein);
  contract(k.riemann, k.ricci_bar, k.scalar_bar, k.einstein_bar);
  return k;
}

PointGeometry point_geometry(const TriadField& triad, const Point& q) {
  PointGeometry pg;
  pg.q = q;
  pg.connection = connection_bundle(triad, q);
  pg.curvature = curvature_bundle(triad, q, pg.connection);
  return pg;
}

Tensor curvature_from_decomposition(const TriadField& triad, const PointGeometry& pg) {
  const ConnectionData& c = pg.connection;
  const CurvatureData& k = pg.curvature;
  const MetricData& m = c.metric;
  if (!c.torsion_defined) {
    fail(ErrorKind::TorsionUndefined, triad.name() + " is metric-only; contortion is undefined");
  }
  const int d = triad.dimension();
  const int n = triad.flat_dimension();

  // d_sig S_{mu nu}^lam straight from the triad.
  Tensor d_torsion({d, d, d, d});
  for (int sig = 0; sig < d; ++sig) {
    for (int mu = 0; mu < d; ++mu) {
      for (int nu = 0; nu < d; ++nu) {
        for (int lam = 0; lam < d; ++lam) {
          double s = 0.0;
          for (int i = 0; i < n; ++i) {
            s += c.d_e_inv(lam, i, sig) * (c.de(i, nu, mu) - c.de(i, mu, nu)) +
                 m.e_inv(lam, i) * (k.dde(i, nu, mu, sig) - k.dde(i, mu, nu, sig));
          }
          d_torsion(sig, mu, nu, lam) = 0.5 * s;
        }
      }
    }
  }
  // Lowered torsion and its derivative.
  Tensor s_low({d, d, d}), ds_low({d, d, d, d});
  for (int mu = 0; mu < d; ++mu) {
    for (int nu = 0; nu < d; ++nu) {
      for (int rho = 0; rho < d; ++rho) {
        double s = 0.0;
        for (int kap = 0; kap < d; ++kap) s += c.torsion(mu, nu, kap) * m.g(kap, rho);
        s_low(mu, nu, rho) = s;
        for (int sig = 0; sig < d; ++sig) {
          double ds = 0.0;
          for (int kap = 0; kap < d; ++kap) {
            ds += d_torsion(sig, mu, nu, kap) * m.g(kap, rho) + c.torsion(mu, nu, kap) * c.dg(kap, rho, sig);
          }
          ds_low(sig, mu, nu, rho) = ds;
        }
      }
    }
  }
  Tensor k_low({d, d, d}), dk_low({d, d, d, d});
  for (int mu = 0; mu < d; ++mu) {
    for (int nu = 0; nu < d; ++nu) {
      for (int rho = 0; rho < d; ++rho) {
        k_low(mu, nu, rho) = s_low(mu, nu, rho) - s_low(nu, rho, mu) + s_low(rho, mu, nu);
        for (int sig = 0; sig < d; ++sig) {
          dk_low(sig, mu, nu, rho) = ds_low(sig, mu, nu, rho) - ds_low(sig, nu, rho, mu) + ds_low(sig, rho, mu, nu);
        }
      }
    }
  }
  Tensor kk({d, d, d}), dk({d, d, d, d});
  for (int sig = 0; sig < d; ++sig) {
    Matrix dg_s(d, d);
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) dg_s(a, b) = c.dg(a, b, sig);
    }
    const Matrix d_ginv = -m.g_inv * dg_s * m.g_inv;
    for (int mu = 0; mu < d; ++mu) {
      for (int nu = 0; nu < d; ++nu) {
        for (int lam = 0; lam < d; ++lam) {
          double s = 0.0, v = 0.0;
          for (int rho = 0; rho < d; ++rho) {
            s += d_ginv(lam, rho) * k_low(mu, nu, rho) + m.g_inv(lam, rho) * dk_low(sig, mu, nu, rho);
            v += m.g_inv(lam, rho) * k_low(mu, nu, rho);
          }
          dk(sig, mu, nu, lam) = s;
          kk(mu, nu, lam) = v;
        }
      }
    }
  }
  const Tensor& gb = c.christoffel;
  // Dbar_mu K_{nu lam}^kap
  Tensor cov({d, d, d, d});
  for (int mu = 0; mu < d; ++mu) {
    for (int nu = 0; nu < d; ++nu) {
      for (int lam = 0; lam < d; ++lam) {
        for (int kap = 0; kap < d; ++kap) {
          double s = dk(mu, nu, lam, kap);
          for (int sg = 0; sg < d; ++sg) {
            s += -gb(mu, nu, sg) * kk(sg, lam, kap) - gb(mu, lam, sg) * kk(nu, sg, kap) + gb(mu, sg, kap) * kk(nu, lam, sg);
          }
          cov(mu, nu, lam, kap) = s;
        }
      }
    }
  }
  Tensor r = k.riemann;
  for (int mu = 0; mu < d; ++mu) {
    for (int nu = 0; nu < d; ++nu) {
      for (int lam = 0; lam < d; ++lam) {
        for (int kap = 0; kap < d; ++kap) {
          double s = cov(mu, nu, lam, kap) - cov(nu, mu, lam, kap);
          for (int sg = 0; sg < d; ++sg) {
            s -= kk(mu, lam, sg) * kk(nu, sg, kap) - kk(nu, lam, sg) * kk(mu, sg, kap);
          }
          r(mu, nu, lam, kap) += s;
        }
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------------------

GeometryBundle::GeometryBundle(TriadPtr triad, bool cache, Tolerances tol)
    : triad_(std::move(triad)), cache_enabled_(cache), tol_(tol) {
  if (!triad_) fail(ErrorKind::ValidationError, "geometry bundle needs a triad");
}

std::shared_ptr<const PointGeometry> GeometryBundle::at(const Point& q) const {
  if (!cache_enabled_) return std::make_shared<const PointGeometry>(point_geometry(*triad_, q));
  std::vector<double> key(q.data(), q.data() + q.size());
  {
    std::shared_lock<std::shared_mutex> lock(mutex_);
    const auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  auto pg = std::make_shared<const PointGeometry>(point_geometry(*triad_, q));
  std::unique_lock<std::shared_mutex> lock(mutex_);
  return cache_.emplace(std::move(key), pg).first->second;
}

std::size_t GeometryBundle::cache_size() const {
  std::shared_lock<std::shared_mutex> lock(mutex_);
  return cache_.size();
}

void GeometryBundle::clear_cache() const {
  std::unique_lock<std::shared_mutex> lock(mutex_);
  cache_.clear();
}

// ---------------------------------------------------------------------------

namespace {

std::vector<int> decode(std::size_t flat, int rank, int d) {
  std::vector<int> idx(rank);
  for (int a = rank - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % static_cast<std::size_t>(d));
    flat /= static_cast<std::size_t>(d);
  }
  return idx;
}

std::size_t encode(const std::vector<int>& idx, int d) {
  std::size_t flat = 0;
  for (int v : idx) flat = flat * static_cast<std::size_t>(d) + static_cast<std::size_t>(v);
  return flat;
}

}  // namespace

TensorValue covariant_derivative(const GeometryBundle& bundle, const TensorField& field, const Point& q,
                                 ConnectionKind mode, double fd_step) {
  const int d = bundle.dimension();
  const int rank = static_cast<int>(field.signature.size());
  if (rank > 3) fail(ErrorKind::Unsupported, "covariant derivative of rank > 3 fields");
  const Tensor t = field.value(q);
  if (t.rank() != rank) fail(ErrorKind::ValidationError, "field rank differs from its signature");

  std::vector<int> out_shape(rank + 1, d);
  Tensor grad(out_shape);
  if (field.gradient) {
    grad = field.gradient(q);
    if (!grad.same_shape(Tensor(out_shape))) fail(ErrorKind::ValidationError, "field gradient has the wrong shape");
  } else {
    const std::size_t block = t.size();
    for (int sig = 0; sig < d; ++sig) {
      const double h = fd_step * (1.0 + std::abs(q[sig]));
      Point qp = q, qm = q;
      qp[sig] += h;
      qm[sig] -= h;
      const Tensor tp = field.value(qp);
      const Tensor tm = field.value(qm);
      for (std::size_t f = 0; f < block; ++f) {
        grad.data()[sig * block + f] = (tp.data()[f] - tm.data()[f]) / (2.0 * h);
      }
    }
  }

  const ConnectionData c = bundle.connection(q);
  const Tensor& gam = mode == ConnectionKind::riemann ? c.christoffel : c.gamma;
  Tensor out = grad;
  const std::size_t block = t.size();
  for (int sig = 0; sig < d; ++sig) {
    for (std::size_t f = 0; f < block; ++f) {
      const std::vector<int> idx = decode(f, rank, d);
      double s = 0.0;
      for (int slot = 0; slot < rank; ++slot) {
        std::vector<int> j = idx;
        for (int k = 0; k < d; ++k) {
          j[slot] = k;
          const double tv = rank == 0 ? 0.0 : t.data()[encode(j, d)];
          if (field.signature[slot] == IndexPosition::upper) {
            s += gam(sig, k, idx[slot]) * tv;
          } else {
            s -= gam(sig, idx[slot], k) * tv;
          }
        }
      }
      out.data()[sig * block + f] += s;
    }
  }
  TensorValue tv;
  tv.signature.push_back(IndexPosition::lower);
  tv.signature.insert(tv.signature.end(), field.signature.begin(), field.signature.end());
  tv.values = std::move(out);
  tv.base = q;
  tv.validate();
  return tv;
}

TensorField metric_field(const GeometryBundle& bundle) {
  TensorField f;
  f.signature = {IndexPosition::lower, IndexPosition::lower};
  f.value = [&bundle](const Point& q) {
    const MetricData m = bundle.metric(q);
    const int d = static_cast<int>(m.g.rows());
    Tensor t({d, d});
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) t(a, b) = m.g(a, b);
    }
    return t;
  };
  f.gradient = [&bundle](const Point& q) {
    const ConnectionData c = bundle.connection(q);
    const int d = bundle.dimension();
    Tensor t({d, d, d});
    for (int s = 0; s < d; ++s) {
      for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) t(s, a, b) = c.dg(a, b, s);
      }
    }
    return t;
  };
  return f;
}

}  // namespace torsiongeo
