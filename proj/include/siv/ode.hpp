#pragma once

// Adaptive Dormand-Prince 8(5,3) integrator with 7th-order dense output,
// following the coefficients and step-size controller of Hairer, Norsett &
// Wanner's DOP853 (Solving Ordinary Differential Equations I, 2nd ed.).
// The state type is any fixed-size Eigen column vector of doubles.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "siv/errors.hpp"

namespace siv::ode {

struct Options {
  double rtol = 1e-10;
  double atol = 1e-10;
  double initial_step = 0.0;  // 0: choose automatically
  double max_step = 0.0;      // 0: |t1 - t0|
  std::int64_t max_steps = 100'000'000;
  double safety = 0.9;
  double min_factor = 1.0 / 3.0;  // largest per-step shrink
  double max_factor = 6.0;        // largest per-step growth
  double beta = 0.04;             // PI stabilisation exponent
};

namespace dop853 {

// Node coefficients.
inline constexpr double c2 = 0.526001519587677318785587544488e-01;
inline constexpr double c3 = 0.789002279381515978178381316732e-01;
inline constexpr double c4 = 0.118350341907227396726757197510e+00;
inline constexpr double c5 = 0.281649658092772603273242802490e+00;
inline constexpr double c6 = 0.333333333333333333333333333333e+00;
inline constexpr double c7 = 0.25e+00;
inline constexpr double c8 = 0.307692307692307692307692307692e+00;
inline constexpr double c9 = 0.651282051282051282051282051282e+00;
inline constexpr double c10 = 0.6e+00;
inline constexpr double c11 = 0.857142857142857142857142857142e+00;
inline constexpr double c14 = 0.1e+00;
inline constexpr double c15 = 0.2e+00;
inline constexpr double c16 = 0.777777777777777777777777777778e+00;

// Runge-Kutta matrix.
inline constexpr double a21 = 5.26001519587677318785587544488e-2;
inline constexpr double a31 = 1.97250569845378994544595329183e-2;
inline constexpr double a32 = 5.91751709536136983633785987549e-2;
inline constexpr double a41 = 2.95875854768068491816892993775e-2;
inline constexpr double a43 = 8.87627564304205475450678981324e-2;
inline constexpr double a51 = 2.41365134159266685502369798665e-1;
inline constexpr double a53 = -8.84549479328286085344864962717e-1;
inline constexpr double a54 = 9.24834003261792003115737966543e-1;
inline constexpr double a61 = 3.7037037037037037037037037037e-2;
inline constexpr double a64 = 1.70828608729473871279604482173e-1;
inline constexpr double a65 = 1.25467687566822425016691814123e-1;
inline constexpr double a71 = 3.7109375e-2;
inline constexpr double a74 = 1.70252211019544039314978060272e-1;
inline constexpr double a75 = 6.02165389804559606850219397283e-2;
inline constexpr double a76 = -1.7578125e-2;
inline constexpr double a81 = 3.70920001185047927108779319836e-2;
inline constexpr double a84 = 1.70383925712239993810214054705e-1;
inline constexpr double a85 = 1.07262030446373284651809199168e-1;
inline constexpr double a86 = -1.53194377486244017527936158236e-2;
inline constexpr double a87 = 8.27378916381402288758473766002e-3;
inline constexpr double a91 = 6.24110958716075717114429577812e-1;
inline constexpr double a94 = -3.36089262944694129406857109825e0;
inline constexpr double a95 = -8.68219346841726006818189891453e-1;
inline constexpr double a96 = 2.75920996994467083049415600797e1;
inline constexpr double a97 = 2.01540675504778934086186788979e1;
inline constexpr double a98 = -4.34898841810699588477366255144e1;
inline constexpr double a101 = 4.77662536438264365890433908527e-1;
inline constexpr double a104 = -2.48811461997166764192642586468e0;
inline constexpr double a105 = -5.90290826836842996371446475743e-1;
inline constexpr double a106 = 2.12300514481811942347288949897e1;
inline constexpr double a107 = 1.52792336328824235832596922938e1;
inline constexpr double a108 = -3.32882109689848629194453265587e1;
inline constexpr double a109 = -2.03312017085086261358222928593e-2;
inline constexpr double a111 = -9.3714243008598732571704021658e-1;
inline constexpr double a114 = 5.18637242884406370830023853209e0;
inline constexpr double a115 = 1.09143734899672957818500254654e0;
inline constexpr double a116 = -8.14978701074692612513997267357e0;
inline constexpr double a117 = -1.85200656599969598641566180701e1;
inline constexpr double a118 = 2.27394870993505042818970056734e1;
inline constexpr double a119 = 2.49360555267965238987089396762e0;
inline constexpr double a1110 = -3.0467644718982195003823669022e0;
inline constexpr double a121 = 2.27331014751653820792359768449e0;
inline constexpr double a124 = -1.05344954667372501984066689879e1;
inline constexpr double a125 = -2.00087205822486249909675718444e0;
inline constexpr double a126 = -1.79589318631187989172765950534e1;
inline constexpr double a127 = 2.79488845294199600508499808837e1;
inline constexpr double a128 = -2.85899827713502369474065508674e0;
inline constexpr double a129 = -8.87285693353062954433549289258e0;
inline constexpr double a1210 = 1.23605671757943030647266201528e1;
inline constexpr double a1211 = 6.43392746015763530355970484046e-1;

// Extra stages for the dense output.
inline constexpr double a141 = 5.61675022830479523392909219681e-2;
inline constexpr double a147 = 2.53500210216624811088794765333e-1;
inline constexpr double a148 = -2.46239037470802489917441475441e-1;
inline constexpr double a149 = -1.24191423263816360469010140626e-1;
inline constexpr double a1410 = 1.5329179827876569731206322685e-1;
inline constexpr double a1411 = 8.20105229563468988491666602057e-3;
inline constexpr double a1412 = 7.56789766054569976138603589584e-3;
inline constexpr double a1413 = -8.298e-3;
inline constexpr double a151 = 3.18346481635021405060768473261e-2;
inline constexpr double a156 = 2.83009096723667755288322961402e-2;
inline constexpr double a157 = 5.35419883074385676223797384372e-2;
inline constexpr double a158 = -5.49237485713909884646569340306e-2;
inline constexpr double a1511 = -1.08347328697249322858509316994e-4;
inline constexpr double a1512 = 3.82571090835658412954920192323e-4;
inline constexpr double a1513 = -3.40465008687404560802977114492e-4;
inline constexpr double a1514 = 1.41312443674632500278074618366e-1;
inline constexpr double a161 = -4.28896301583791923408573538692e-1;
inline constexpr double a166 = -4.69762141536116384314449447206e0;
inline constexpr double a167 = 7.68342119606259904184240953878e0;
inline constexpr double a168 = 4.06898981839711007970213554331e0;
inline constexpr double a169 = 3.56727187455281109270669543021e-1;
inline constexpr double a1613 = -1.39902416515901462129418009734e-3;
inline constexpr double a1614 = 2.9475147891527723389556272149e0;
inline constexpr double a1615 = -9.15095847217987001081870187138e0;

// 8th-order weights.
inline constexpr double b1 = 5.42937341165687622380535766363e-2;
inline constexpr double b6 = 4.45031289275240888144113950566e0;
inline constexpr double b7 = 1.89151789931450038304281599044e0;
inline constexpr double b8 = -5.8012039600105847814672114227e0;
inline constexpr double b9 = 3.1116436695781989440891606237e-1;
inline constexpr double b10 = -1.52160949662516078556178806805e-1;
inline constexpr double b11 = 2.01365400804030348374776537501e-1;
inline constexpr double b12 = 4.47106157277725905176885569043e-2;

// 3rd-order error weights.
inline constexpr double bhh1 = 0.244094488188976377952755905512e+00;
inline constexpr double bhh2 = 0.733846688281611857341361741547e+00;
inline constexpr double bhh3 = 0.220588235294117647058823529412e-01;

// 5th-order error weights.
inline constexpr double er1 = 0.1312004499419488073250102996e-01;
inline constexpr double er6 = -0.1225156446376204440720569753e+01;
inline constexpr double er7 = -0.4957589496572501915214079952e+00;
inline constexpr double er8 = 0.1664377182454986536961530415e+01;
inline constexpr double er9 = -0.3503288487499736816886487290e+00;
inline constexpr double er10 = 0.3341791187130174790297318841e+00;
inline constexpr double er11 = 0.8192320648511571246570742613e-01;
inline constexpr double er12 = -0.2235530786388629525884427845e-01;

// Dense-output coefficient rows.
inline constexpr double d41 = -0.84289382761090128651353491142e+01;
inline constexpr double d46 = 0.56671495351937776962531783590e+00;
inline constexpr double d47 = -0.30689499459498916912797304727e+01;
inline constexpr double d48 = 0.23846676565120698287728149680e+01;
inline constexpr double d49 = 0.21170345824450282767155149946e+01;
inline constexpr double d410 = -0.87139158377797299206789907490e+00;
inline constexpr double d411 = 0.22404374302607882758541771650e+01;
inline constexpr double d412 = 0.63157877876946881815570249290e+00;
inline constexpr double d413 = -0.88990336451333310820698117400e-01;
inline constexpr double d414 = 0.18148505520854727256656404962e+02;
inline constexpr double d415 = -0.91946323924783554000451984436e+01;
inline constexpr double d416 = -0.44360363875948939664310572000e+01;
inline constexpr double d51 = 0.10427508642579134603413151009e+02;
inline constexpr double d56 = 0.24228349177525818288430175319e+03;
inline constexpr double d57 = 0.16520045171727028198505394887e+03;
inline constexpr double d58 = -0.37454675472269020279518312152e+03;
inline constexpr double d59 = -0.22113666853125306036270938578e+02;
inline constexpr double d510 = 0.77334326684722638389603898808e+01;
inline constexpr double d511 = -0.30674084731089398182061213626e+02;
inline constexpr double d512 = -0.93321305264302278729567221706e+01;
inline constexpr double d513 = 0.15697238121770843886131091075e+02;
inline constexpr double d514 = -0.31139403219565177677282850411e+02;
inline constexpr double d515 = -0.93529243588444783865713862664e+01;
inline constexpr double d516 = 0.35816841486394083752465898540e+02;
inline constexpr double d61 = 0.19985053242002433820987653617e+02;
inline constexpr double d66 = -0.38703730874935176555105901742e+03;
inline constexpr double d67 = -0.18917813819516756882830838328e+03;
inline constexpr double d68 = 0.52780815920542364900561016686e+03;
inline constexpr double d69 = -0.11573902539959630126141871134e+02;
inline constexpr double d610 = 0.68812326946963000169666922661e+01;
inline constexpr double d611 = -0.10006050966910838403183860980e+01;
inline constexpr double d612 = 0.77771377980534432092869265740e+00;
inline constexpr double d613 = -0.27782057523535084065932004339e+01;
inline constexpr double d614 = -0.60196695231264120758267380846e+02;
inline constexpr double d615 = 0.84320405506677161018159903784e+02;
inline constexpr double d616 = 0.11992291136182789328035130030e+02;
inline constexpr double d71 = -0.25693933462703749003312586129e+02;
inline constexpr double d76 = -0.15418974869023643374053993627e+03;
inline constexpr double d77 = -0.23152937917604549567536039109e+03;
inline constexpr double d78 = 0.35763911791061412378285349910e+03;
inline constexpr double d79 = 0.93405324183624310003907691704e+02;
inline constexpr double d710 = -0.37458323136451633156875139351e+02;
inline constexpr double d711 = 0.10409964950896230045147246184e+03;
inline constexpr double d712 = 0.29840293426660503123344363579e+02;
inline constexpr double d713 = -0.43533456590011143754432175058e+02;
inline constexpr double d714 = 0.96324553959188282948394950600e+02;
inline constexpr double d715 = -0.39177261675615439165231486172e+02;
inline constexpr double d716 = -0.14972683625798562581422125276e+03;

}  // namespace dop853

/// One accepted step together with its interpolating polynomial.
template <class State>
struct DenseSegment {
  double t0;  // step start
  double h;   // signed step size
  std::array<State, 8> c;

  State eval(double t) const {
    const double s = (t - t0) / h;
    const double s1 = 1.0 - s;
    return c[0] +
           s * (c[1] +
                s1 * (c[2] + s * (c[3] + s1 * (c[4] + s * (c[5] + s1 * (c[6] + s * c[7]))))));
  }
};

/// Piecewise interpolant covering the whole integration span.
template <class State>
class DenseSolution {
 public:
  DenseSolution() = default;

  double t_front() const { return t_front_; }
  double t_back() const { return t_back_; }
  const State& y_back() const { return y_back_; }
  const std::vector<DenseSegment<State>>& segments() const { return segments_; }
  bool stopped_early() const { return stopped_early_; }
  std::int64_t n_accepted() const { return static_cast<std::int64_t>(segments_.size()); }
  std::int64_t n_rejected() const { return n_rejected_; }

  bool contains(double t) const {
    const double lo = std::min(t_front_, t_back_);
    const double hi = std::max(t_front_, t_back_);
    const double slack = 16.0 * std::numeric_limits<double>::epsilon() * (std::abs(lo) + std::abs(hi) + 1.0);
    return t >= lo - slack && t <= hi + slack;
  }

  State operator()(double t) const {
    if (segments_.empty()) throw domain_error("DenseSolution: empty solution");
    if (!contains(t)) throw domain_error("DenseSolution: time outside the integrated span");
    return segments_[locate(t)].eval(t);
  }

  // Internal construction interface used by integrate().
  void reserve(std::size_t n) { segments_.reserve(n); }
  void push(DenseSegment<State> seg) {
    if (segments_.empty()) t_front_ = seg.t0;
    t_back_ = seg.t0 + seg.h;
    segments_.push_back(std::move(seg));
  }
  void finish(State y_end, std::int64_t n_rejected, bool stopped) {
    y_back_ = std::move(y_end);
    n_rejected_ = n_rejected;
    stopped_early_ = stopped;
  }

 private:
  std::size_t locate(double t) const {
    const bool fwd = t_back_ >= t_front_;
    std::size_t lo = 0, hi = segments_.size() - 1;
    while (lo < hi) {
      const std::size_t mid = (lo + hi) / 2;
      const double t_end = segments_[mid].t0 + segments_[mid].h;
      if (fwd ? (t <= t_end) : (t >= t_end))
        hi = mid;
      else
        lo = mid + 1;
    }
    return lo;
  }

  std::vector<DenseSegment<State>> segments_;
  State y_back_{};
  double t_front_ = 0.0;
  double t_back_ = 0.0;
  std::int64_t n_rejected_ = 0;
  bool stopped_early_ = false;
};

namespace detail {

template <class State, class Rhs>
double initial_step(Rhs& f, double t0, const State& y0, const State& k1, double dir, double hmax,
                    const Options& opt) {
  const int n = static_cast<int>(y0.size());
  double dnf = 0.0, dny = 0.0;
  for (int i = 0; i < n; ++i) {
    const double sk = opt.atol + opt.rtol * std::abs(y0[i]);
    dnf += (k1[i] / sk) * (k1[i] / sk);
    dny += (y0[i] / sk) * (y0[i] / sk);
  }
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
  h = std::min(h, hmax);

  const State y1 = y0 + (h * dir) * k1;
  const State k2 = f(t0 + h * dir, y1);
  double der2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double sk = opt.atol + opt.rtol * std::abs(y0[i]);
    der2 += ((k2[i] - k1[i]) / sk) * ((k2[i] - k1[i]) / sk);
  }
  der2 = std::sqrt(der2) / h;

  const double der12 = std::max(std::abs(der2), std::sqrt(dnf));
  const double h1 = (der12 <= 1e-15) ? std::max(1e-6, std::abs(h) * 1e-3)
                                     : std::pow(0.01 / der12, 1.0 / 8.0);
  return std::min({100.0 * h, h1, hmax});
}

}  // namespace detail

/// Integrates y' = f(t, y) from t0 to t1 and returns the dense solution.
///
/// `stop_when(t, y)`, if given, is evaluated after every accepted step;
/// returning true ends the integration at that step (the solution is then
/// marked stopped_early).  Throws tolerance_error when the error controller
/// underflows the step size or exceeds max_steps.
template <class State, class Rhs>
DenseSolution<State> integrate(Rhs&& f, double t0, const State& y0, double t1,
                               const Options& opt = {},
                               const std::function<bool(double, const State&)>& stop_when = {}) {
  namespace tb = dop853;
  static constexpr double uround = std::numeric_limits<double>::epsilon();

  if (!(t1 != t0)) throw domain_error("ode::integrate: empty integration span");
  if (!(opt.rtol > 0.0) || !(opt.atol > 0.0))
    throw domain_error("ode::integrate: tolerances must be positive");

  const double dir = (t1 > t0) ? 1.0 : -1.0;
  const double hmax = (opt.max_step > 0.0) ? opt.max_step : std::abs(t1 - t0);
  const int n = static_cast<int>(y0.size());

  double t = t0;
  State y = y0;
  State k1 = f(t, y);

  double h = (opt.initial_step > 0.0)
                 ? std::min(opt.initial_step, hmax) * dir
                 : detail::initial_step(f, t, y, k1, dir, hmax, opt) * dir;

  const double expo1 = 1.0 / 8.0 - opt.beta * 0.2;
  const double facc1 = 1.0 / opt.min_factor;
  const double facc2 = 1.0 / opt.max_factor;
  double facold = 1e-4;

  DenseSolution<State> sol;
  std::int64_t n_rejected = 0;
  bool rejected = false;
  bool last = false;
  bool stopped = false;

  State k2 = k1, k3 = k1, k4 = k1, k5 = k1, k6 = k1, k7 = k1, k8 = k1, k9 = k1, k10 = k1,
        k11 = k1, k12 = k1;

  for (std::int64_t step = 0;; ++step) {
    if (step >= opt.max_steps)
      throw tolerance_error("ode::integrate: maximum number of steps exceeded");
    if (0.1 * std::abs(h) <= std::abs(t) * uround)
      throw tolerance_error("ode::integrate: step size underflow (tolerance not met)");

    if ((t + 1.01 * h - t1) * dir > 0.0) {
      h = t1 - t;
      last = true;
    }

    State yw = y + h * (tb::a21 * k1);
    k2 = f(t + tb::c2 * h, yw);
    yw = y + h * (tb::a31 * k1 + tb::a32 * k2);
    k3 = f(t + tb::c3 * h, yw);
    yw = y + h * (tb::a41 * k1 + tb::a43 * k3);
    k4 = f(t + tb::c4 * h, yw);
    yw = y + h * (tb::a51 * k1 + tb::a53 * k3 + tb::a54 * k4);
    k5 = f(t + tb::c5 * h, yw);
    yw = y + h * (tb::a61 * k1 + tb::a64 * k4 + tb::a65 * k5);
    k6 = f(t + tb::c6 * h, yw);
    yw = y + h * (tb::a71 * k1 + tb::a74 * k4 + tb::a75 * k5 + tb::a76 * k6);
    k7 = f(t + tb::c7 * h, yw);
    yw = y + h * (tb::a81 * k1 + tb::a84 * k4 + tb::a85 * k5 + tb::a86 * k6 + tb::a87 * k7);
    k8 = f(t + tb::c8 * h, yw);
    yw = y + h * (tb::a91 * k1 + tb::a94 * k4 + tb::a95 * k5 + tb::a96 * k6 + tb::a97 * k7 +
                  tb::a98 * k8);
    k9 = f(t + tb::c9 * h, yw);
    yw = y + h * (tb::a101 * k1 + tb::a104 * k4 + tb::a105 * k5 + tb::a106 * k6 + tb::a107 * k7 +
                  tb::a108 * k8 + tb::a109 * k9);
    k10 = f(t + tb::c10 * h, yw);
    yw = y + h * (tb::a111 * k1 + tb::a114 * k4 + tb::a115 * k5 + tb::a116 * k6 + tb::a117 * k7 +
                  tb::a118 * k8 + tb::a119 * k9 + tb::a1110 * k10);
    k11 = f(t + tb::c11 * h, yw);
    yw = y + h * (tb::a121 * k1 + tb::a124 * k4 + tb::a125 * k5 + tb::a126 * k6 + tb::a127 * k7 +
                  tb::a128 * k8 + tb::a129 * k9 + tb::a1210 * k10 + tb::a1211 * k11);
    k12 = f(t + h, yw);

    const State ksum = tb::b1 * k1 + tb::b6 * k6 + tb::b7 * k7 + tb::b8 * k8 + tb::b9 * k9 +
                       tb::b10 * k10 + tb::b11 * k11 + tb::b12 * k12;
    const State y1 = y + h * ksum;

    // Combined 5th/3rd order error estimate.
    const State e5 = tb::er1 * k1 + tb::er6 * k6 + tb::er7 * k7 + tb::er8 * k8 + tb::er9 * k9 +
                     tb::er10 * k10 + tb::er11 * k11 + tb::er12 * k12;
    const State e3 = ksum - tb::bhh1 * k1 - tb::bhh2 * k9 - tb::bhh3 * k12;
    double err5 = 0.0, err3 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double sk = opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y1[i]));
      err5 += (e5[i] / sk) * (e5[i] / sk);
      err3 += (e3[i] / sk) * (e3[i] / sk);
    }
    double deno = err5 + 0.01 * err3;
    if (deno <= 0.0) deno = 1.0;
    const double err = std::abs(h) * err5 * std::sqrt(1.0 / (n * deno));

    const double fac11 = std::pow(err, expo1);
    if (err <= 1.0) {
      facold = std::max(err, 1e-4);

      const State k13 = f(t + h, y1);

      // Three extra stages for the order-7 interpolant.
      yw = y + h * (tb::a141 * k1 + tb::a147 * k7 + tb::a148 * k8 + tb::a149 * k9 +
                    tb::a1410 * k10 + tb::a1411 * k11 + tb::a1412 * k12 + tb::a1413 * k13);
      const State k14 = f(t + tb::c14 * h, yw);
      yw = y + h * (tb::a151 * k1 + tb::a156 * k6 + tb::a157 * k7 + tb::a158 * k8 +
                    tb::a1511 * k11 + tb::a1512 * k12 + tb::a1513 * k13 + tb::a1514 * k14);
      const State k15 = f(t + tb::c15 * h, yw);
      yw = y + h * (tb::a161 * k1 + tb::a166 * k6 + tb::a167 * k7 + tb::a168 * k8 +
                    tb::a169 * k9 + tb::a1613 * k13 + tb::a1614 * k14 + tb::a1615 * k15);
      const State k16 = f(t + tb::c16 * h, yw);

      DenseSegment<State> seg;
      seg.t0 = t;
      seg.h = h;
      seg.c[0] = y;
      seg.c[1] = y1 - y;
      seg.c[2] = h * k1 - seg.c[1];
      seg.c[3] = seg.c[1] - h * k13 - seg.c[2];
      seg.c[4] = h * (tb::d41 * k1 + tb::d46 * k6 + tb::d47 * k7 + tb::d48 * k8 + tb::d49 * k9 +
                      tb::d410 * k10 + tb::d411 * k11 + tb::d412 * k12 + tb::d413 * k13 +
                      tb::d414 * k14 + tb::d415 * k15 + tb::d416 * k16);
      seg.c[5] = h * (tb::d51 * k1 + tb::d56 * k6 + tb::d57 * k7 + tb::d58 * k8 + tb::d59 * k9 +
                      tb::d510 * k10 + tb::d511 * k11 + tb::d512 * k12 + tb::d513 * k13 +
                      tb::d514 * k14 + tb::d515 * k15 + tb::d516 * k16);
      seg.c[6] = h * (tb::d61 * k1 + tb::d66 * k6 + tb::d67 * k7 + tb::d68 * k8 + tb::d69 * k9 +
                      tb::d610 * k10 + tb::d611 * k11 + tb::d612 * k12 + tb::d613 * k13 +
                      tb::d614 * k14 + tb::d615 * k15 + tb::d616 * k16);
      seg.c[7] = h * (tb::d71 * k1 + tb::d76 * k6 + tb::d77 * k7 + tb::d78 * k8 + tb::d79 * k9 +
                      tb::d710 * k10 + tb::d711 * k11 + tb::d712 * k12 + tb::d713 * k13 +
                      tb::d714 * k14 + tb::d715 * k15 + tb::d716 * k16);
      sol.push(std::move(seg));

      t += h;
      y = y1;
      k1 = k13;

      if (stop_when && stop_when(t, y)) {
        stopped = true;
        break;
      }
      if (last) break;

      double fac = fac11 / std::pow(facold, opt.beta);
      fac = std::max(facc2, std::min(facc1, fac / opt.safety));
      double hnew = h / fac;
      if (rejected) hnew = dir * std::min(std::abs(hnew), std::abs(h));
      if (std::abs(hnew) > hmax) hnew = dir * hmax;
      h = hnew;
      rejected = false;
    } else {
      h /= std::min(facc1, fac11 / opt.safety);
      rejected = true;
      last = false;
      ++n_rejected;
    }
  }

  sol.finish(std::move(y), n_rejected, stopped);
  return sol;
}

/// Brent root bracketing refinement: f must change sign over [a, b].
template <class F>
double find_root(F&& f, double a, double b, double tol_abs = 0.0, int max_iter = 200) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0))
    throw domain_error("find_root: interval does not bracket a root");

  double c = a, fc = fa;
  double d = b - a, e = d;
  for (int it = 0; it < max_iter; ++it) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double eps = std::numeric_limits<double>::epsilon();
    const double tol1 = 2.0 * eps * std::abs(b) + 0.5 * tol_abs;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;

    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * xm * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * xm * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      p = std::abs(p);
      if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol1 * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
  }
  return b;
}

}  // namespace siv::ode
