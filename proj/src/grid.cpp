#include "rieszgas/grid.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>

namespace rieszgas {

double GridFunction::interpolate(const Point& p) const {
    const int d = grid.d;
    const double h = grid.spacing();
    for (int a = 0; a < d; ++a) {
        if (p[a] < grid.lo - 1e-12 || p[a] > grid.hi + 1e-12)
            throw std::domain_error("interpolate: point outside grid box");
    }
    // Cell-center coordinates: x = lo + (k + 0.5) h.
    std::array<int, kMaxDim> k0{0, 0, 0};
    std::array<double, kMaxDim> t{0, 0, 0};
    for (int a = 0; a < d; ++a) {
        double u = (p[a] - grid.lo) / h - 0.5;
        double fl = std::floor(u);
        int k = static_cast<int>(fl);
        double frac = u - fl;
        if (k < 0) { k = 0; frac = 0.0; }
        if (k >= grid.n - 1) { k = grid.n - 2; frac = 1.0; }
        k0[a] = k;
        t[a] = frac;
    }
    double acc = 0.0;
    const int corners = 1 << d;
    for (int c = 0; c < corners; ++c) {
        std::array<int, kMaxDim> k = k0;
        double wgt = 1.0;
        for (int a = 0; a < d; ++a) {
            if (c & (1 << a)) {
                k[a] += 1;
                wgt *= t[a];
            } else {
                wgt *= 1.0 - t[a];
            }
        }
        acc += wgt * values[static_cast<size_t>(grid.flatten(k))];
    }
    return acc;
}

double integral(const GridFunction& f) {
    double s = 0;
    for (double v : f.values) s += v;
    return s * f.grid.cell_volume();
}

namespace {

// FFTW planning is not thread safe; execution with new arrays is. Plans are
// cached per (rank, n, direction) and created under a lock.
struct PlanCache {
    std::mutex mu;
    std::map<std::tuple<int, int, int>, fftw_plan> plans;

    fftw_plan get(int rank, int n, int sign) {
        std::lock_guard<std::mutex> lock(mu);
        auto key = std::make_tuple(rank, n, sign);
        auto it = plans.find(key);
        if (it != plans.end()) return it->second;
        std::vector<int> dims(static_cast<size_t>(rank), n);
        std::vector<fftw_complex> buf(static_cast<size_t>(std::pow(n, rank)));
        fftw_plan p = fftw_plan_dft(rank, dims.data(), buf.data(), buf.data(), sign,
                                    FFTW_ESTIMATE | FFTW_UNALIGNED);
        plans[key] = p;
        return p;
    }
};

PlanCache& plan_cache() {
    static PlanCache cache;
    return cache;
}

void execute(int rank, int n, int sign, std::vector<std::complex<double>>& a) {
    fftw_plan p = plan_cache().get(rank, n, sign);
    auto* ptr = reinterpret_cast<fftw_complex*>(a.data());
    fftw_execute_dft(p, ptr, ptr);
}

}  // namespace

SpectralWorkspace::SpectralWorkspace(const Grid& g, int pad_factor)
    : grid_(g), m_(pad_factor * g.n) {
    if (pad_factor != 1 && pad_factor != 2)
        throw std::invalid_argument("SpectralWorkspace: pad_factor must be 1 or 2");
    psize_ = 1;
    for (int a = 0; a < g.d; ++a) psize_ *= m_;
}

std::vector<std::complex<double>> SpectralWorkspace::pad(const std::vector<double>& v) const {
    if (static_cast<std::int64_t>(v.size()) != grid_.size())
        throw std::invalid_argument("pad: size mismatch");
    std::vector<std::complex<double>> out(static_cast<size_t>(psize_), {0.0, 0.0});
    const int n = grid_.n, d = grid_.d;
    for (std::int64_t i = 0; i < grid_.size(); ++i) {
        auto k = grid_.unflatten(i);
        std::int64_t pidx = 0;
        for (int a = 0; a < d; ++a) pidx = pidx * m_ + k[a];
        out[static_cast<size_t>(pidx)] = v[static_cast<size_t>(i)];
    }
    (void)n;
    return out;
}

std::vector<double> SpectralWorkspace::unpad(const std::vector<std::complex<double>>& p) const {
    std::vector<double> out(static_cast<size_t>(grid_.size()), 0.0);
    const int d = grid_.d;
    for (std::int64_t i = 0; i < grid_.size(); ++i) {
        auto k = grid_.unflatten(i);
        std::int64_t pidx = 0;
        for (int a = 0; a < d; ++a) pidx = pidx * m_ + k[a];
        out[static_cast<size_t>(i)] = p[static_cast<size_t>(pidx)].real();
    }
    return out;
}

void SpectralWorkspace::forward(std::vector<std::complex<double>>& a) const {
    execute(grid_.d, m_, FFTW_FORWARD, a);
}

void SpectralWorkspace::inverse(std::vector<std::complex<double>>& a) const {
    execute(grid_.d, m_, FFTW_BACKWARD, a);
    double scale = 1.0 / static_cast<double>(psize_);
    for (auto& z : a) z *= scale;
}

double SpectralWorkspace::freq(int k) const {
    int kk = (k < m_ / 2) ? k : k - m_;
    return kk / (m_ * grid_.spacing());
}

std::array<int, kMaxDim> SpectralWorkspace::unflatten_padded(std::int64_t idx) const {
    std::array<int, kMaxDim> k{0, 0, 0};
    for (int a = grid_.d - 1; a >= 0; --a) {
        k[a] = static_cast<int>(idx % m_);
        idx /= m_;
    }
    return k;
}

double SpectralWorkspace::freq_norm(std::int64_t idx) const {
    auto k = unflatten_padded(idx);
    double s = 0;
    for (int a = 0; a < grid_.d; ++a) {
        double f = freq(k[a]);
        s += f * f;
    }
    return std::sqrt(s);
}

double SpectralWorkspace::freq_cell() const {
    return std::pow(1.0 / (m_ * grid_.spacing()), grid_.d);
}

}  // namespace rieszgas
