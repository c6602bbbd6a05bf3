#include "mwd/farfield.hpp"

#include "mwd/kernels.hpp"
#include "mwd/units.hpp"

#include <fftw3.h>
#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <memory>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace mwd
{

namespace
{

using complex = std::complex<double>;

struct OpenPixels
{
    std::vector<double> x, y;  // m
    std::vector<complex> t;
    double cx{0}, cy{0}, diameter{0};
};

OpenPixels open_pixels(PhaseMap const& map)
{
    Window const& w = map.window();
    OpenPixels o;
    for (int j = 0; j < w.ny; ++j)
        for (int i = 0; i < w.nx; ++i)
        {
            if (!map.mask.at(i, j))
                continue;
            double const ph = map.at(i, j);
            o.x.push_back(w.x(i) * units::bohr_m);
            o.y.push_back(w.y(j) * units::bohr_m);
            o.t.push_back(std::polar(1.0, std::isnan(ph) ? 0.0 : ph));
        }
    if (o.t.empty())
        return o;
    for (std::size_t n = 0; n < o.t.size(); ++n)
    {
        o.cx += o.x[n];
        o.cy += o.y[n];
    }
    o.cx /= double(o.t.size());
    o.cy /= double(o.t.size());
    double r2 = 0;
    for (std::size_t n = 0; n < o.t.size(); ++n)
        r2 = std::max(r2, (o.x[n] - o.cx) * (o.x[n] - o.cx) + (o.y[n] - o.cy) * (o.y[n] - o.cy));
    // Pixel half diagonal so a single open pixel still has a size.
    double const px = std::hypot(w.dx(), w.dy()) * units::bohr_m;
    o.diameter = 2 * std::sqrt(r2) + px;
    return o;
}

// Symmetric bin selection along one axis.
struct Bins
{
    int n_fft;
    int stride;
    int q_max;  // samples are p = stride * q, |q| <= q_max
    double bin_m;
};

Bins choose_bins(int n, double d_m, ScreenSpec const& s, double lambda, double half_width)
{
    Bins b;
    b.n_fft = s.padding * n;
    b.bin_m = s.distance_m * lambda / (b.n_fft * d_m);
    int const p_max = std::min(int(std::floor(half_width / b.bin_m)), b.n_fft / 2 - 1);
    b.stride = 1;
    while (2 * (p_max / b.stride) + 1 > s.max_samples)
        ++b.stride;
    b.q_max = p_max / b.stride;
    return b;
}

struct FftwDeleter
{
    void operator()(fftw_complex* p) const { fftw_free(p); }
};

}  // namespace

std::string_view to_string(FarfieldMethod m)
{
    return m == FarfieldMethod::fft ? "fft" : "direct";
}

FarfieldMethod parse_farfield_method(std::string_view s)
{
    if (s == "fft")
        return FarfieldMethod::fft;
    if (s == "direct")
        return FarfieldMethod::direct;
    throw std::invalid_argument("unknown diffraction method: " + std::string(s));
}

DiffractionPattern fraunhofer(PhaseMap const& map, double lambda_m, ScreenSpec const& screen, FarfieldMethod method)
{
    if (!(lambda_m > 0))
        throw std::invalid_argument("fraunhofer: wavelength must be positive");
    if (!(screen.distance_m > 0))
        throw std::invalid_argument("fraunhofer: screen distance must be positive");
    if (screen.padding < 4)
        throw std::invalid_argument("fraunhofer: zero padding must be at least 4");
    if (screen.max_samples < 1)
        throw std::invalid_argument("fraunhofer: max_samples must be positive");
    Window const& w = map.window();
    w.validate();

    DiffractionPattern out;
    out.distance_m = screen.distance_m;
    out.lambda_m = lambda_m;
    out.velocity_mps = map.velocity_mps;
    out.hole_name = map.hole_name;
    out.method = method;

    OpenPixels const open = open_pixels(map);
    if (open.t.empty())
    {
        out.no_transmission = true;
        return out;
    }
    out.open_diameter_m = open.diameter;
    out.fresnel_number = (open.diameter / 2) * (open.diameter / 2) / (lambda_m * screen.distance_m);
    if (out.fresnel_number > 0.1)
        out.warnings.push_back("Fresnel number " + std::to_string(out.fresnel_number)
                               + " exceeds 0.1; the far-field approximation is poor");
    if (lambda_m / open.diameter > 0.1)
        out.warnings.push_back("angular spread lambda/D = " + std::to_string(lambda_m / open.diameter)
                               + " rad; the small-angle screen mapping is approximate");

    double const dx = w.dx() * units::bohr_m;
    double const dy = w.dy() * units::bohr_m;
    double half = screen.half_width_m;
    if (half <= 0)
        half = screen.distance_m * std::min(8 * lambda_m / open.diameter, 0.5);
    Bins const bx = choose_bins(w.nx, dx, screen, lambda_m, half);
    Bins const by = choose_bins(w.ny, dy, screen, lambda_m, half);
    int const nx_out = 2 * bx.q_max + 1;
    int const ny_out = 2 * by.q_max + 1;
    for (int q = -bx.q_max; q <= bx.q_max; ++q)
        out.x_m.push_back(q * bx.stride * bx.bin_m);
    for (int q = -by.q_max; q <= by.q_max; ++q)
        out.y_m.push_back(q * by.stride * by.bin_m);

    std::vector<complex> amp(std::size_t(nx_out) * ny_out);
    if (method == FarfieldMethod::fft)
    {
        std::size_t const total = std::size_t(bx.n_fft) * by.n_fft;
        std::unique_ptr<fftw_complex[], FftwDeleter> buf(fftw_alloc_complex(total));
        if (!buf)
            throw std::bad_alloc();
        // FFTW_FORWARD carries exp(-i ...), the sign of the far-field kernel.
        fftw_plan plan = fftw_plan_dft_2d(by.n_fft, bx.n_fft, buf.get(), buf.get(), FFTW_FORWARD, FFTW_ESTIMATE);
        std::fill_n(&buf[0][0], 2 * total, 0.0);
        for (int j = 0; j < w.ny; ++j)
            for (int i = 0; i < w.nx; ++i)
            {
                if (!map.mask.at(i, j))
                    continue;
                double const ph = map.at(i, j);
                std::size_t const k = std::size_t(j) * bx.n_fft + i;
                buf[k][0] = std::cos(ph);
                buf[k][1] = std::sin(ph);
            }
        fftw_execute(plan);
        fftw_destroy_plan(plan);
        for (int qy = -by.q_max; qy <= by.q_max; ++qy)
        {
            int const py = ((qy * by.stride) % by.n_fft + by.n_fft) % by.n_fft;
            for (int qx = -bx.q_max; qx <= bx.q_max; ++qx)
            {
                int const px = ((qx * bx.stride) % bx.n_fft + bx.n_fft) % bx.n_fft;
                auto const& v = buf[std::size_t(py) * bx.n_fft + px];
                amp[std::size_t(qy + by.q_max) * nx_out + (qx + bx.q_max)] = complex(v[0], v[1]);
            }
        }
    }
    else
    {
        // Separable sums: rows against the x twiddles, then columns against y.
        auto twiddles = [](int n_in, Bins const& b, std::vector<double>& re, std::vector<double>& im) {
            int const n_out = 2 * b.q_max + 1;
            re.resize(std::size_t(n_out) * n_in);
            im.resize(re.size());
            for (int q = 0; q < n_out; ++q)
            {
                long const p = long(q - b.q_max) * b.stride;
                for (int m = 0; m < n_in; ++m)
                {
                    // Reduce the bin product exactly before scaling to an angle.
                    long const r = ((p * m) % b.n_fft + b.n_fft) % b.n_fft;
                    double const ang = 2 * std::numbers::pi * double(r) / b.n_fft;
                    re[std::size_t(q) * n_in + m] = std::cos(ang);
                    im[std::size_t(q) * n_in + m] = -std::sin(ang);
                }
            }
        };
        std::vector<double> wx_re, wx_im, wy_re, wy_im;
        twiddles(w.nx, bx, wx_re, wx_im);
        twiddles(w.ny, by, wy_re, wy_im);

        std::vector<double> t_re(std::size_t(w.nx)), t_im(std::size_t(w.nx));
        // col_*[qx * ny + j]: row sums laid out for the second pass.
        std::vector<double> col_re(std::size_t(nx_out) * w.ny, 0.0), col_im(col_re.size(), 0.0);
        for (int j = 0; j < w.ny; ++j)
        {
            bool any = false;
            for (int i = 0; i < w.nx; ++i)
            {
                bool const o = map.mask.at(i, j);
                double const ph = o ? map.at(i, j) : 0.0;
                t_re[i] = o ? std::cos(ph) : 0.0;
                t_im[i] = o ? std::sin(ph) : 0.0;
                any = any || o;
            }
            if (!any)
                continue;
            for (int q = 0; q < nx_out; ++q)
            {
                double re, im;
                kernels::complex_dot(t_re.data(), t_im.data(), &wx_re[std::size_t(q) * w.nx],
                                     &wx_im[std::size_t(q) * w.nx], std::size_t(w.nx), re, im);
                col_re[std::size_t(q) * w.ny + j] = re;
                col_im[std::size_t(q) * w.ny + j] = im;
            }
        }
        for (int qy = 0; qy < ny_out; ++qy)
            for (int qx = 0; qx < nx_out; ++qx)
            {
                double re, im;
                kernels::complex_dot(&wy_re[std::size_t(qy) * w.ny], &wy_im[std::size_t(qy) * w.ny],
                                     &col_re[std::size_t(qx) * w.ny], &col_im[std::size_t(qx) * w.ny],
                                     std::size_t(w.ny), re, im);
                amp[std::size_t(qy) * nx_out + qx] = complex(re, im);
            }
    }

    double const area = dx * dy;
    out.intensity.resize(amp.size());
    double peak = 0;
    for (std::size_t n = 0; n < amp.size(); ++n)
    {
        out.intensity[n] = std::norm(amp[n] * area);
        peak = std::max(peak, out.intensity[n]);
    }
    out.peak = peak;
    for (double& v : out.intensity)
        v /= peak;
    return out;
}

PhaseMap make_phase_map(Window const& window,
                        std::function<bool(double, double)> const& open,
                        std::function<double(double, double)> const& phase,
                        double velocity_mps)
{
    window.validate();
    PhaseMap map;
    map.mask.window = window;
    map.velocity_mps = velocity_mps;
    map.lambda_db_m = units::de_broglie_wavelength(units::helium_mass_kg, velocity_mps);
    std::size_t const n = std::size_t(window.nx) * window.ny;
    map.mask.open.assign(n, 0);
    map.phase.assign(n, std::numeric_limits<double>::quiet_NaN());
    for (int j = 0; j < window.ny; ++j)
        for (int i = 0; i < window.nx; ++i)
        {
            double const x = window.x(i), y = window.y(j);
            if (!open(x, y))
                continue;
            std::size_t const k = std::size_t(j) * window.nx + i;
            map.mask.open[k] = 1;
            map.phase[k] = phase ? phase(x, y) : 0.0;
            ++map.mask.report.open_pixels;
        }
    map.mask.report.open_area = double(map.mask.report.open_pixels) * window.pixel_area();
    return map;
}

std::complex<double> fraunhofer_amplitude(PhaseMap const& map, double kx, double ky)
{
    Window const& w = map.window();
    complex sum = 0;
    for (int j = 0; j < w.ny; ++j)
        for (int i = 0; i < w.nx; ++i)
        {
            if (!map.mask.at(i, j))
                continue;
            double const ph = map.at(i, j);
            double const arg = -(kx * w.x(i) + ky * w.y(j)) * units::bohr_m + (std::isnan(ph) ? 0 : ph);
            sum += std::polar(1.0, arg);
        }
    return sum * (w.pixel_area() * units::bohr_m * units::bohr_m);
}

double obliquity(double source_distance_m, double rho_x, double rho_y, ScreenPoint const& p)
{
    double const sx = p.x - rho_x, sy = p.y - rho_y;
    double const s = std::sqrt(sx * sx + sy * sy + p.z * p.z);
    double cos_r0 = 1.0;
    if (std::isfinite(source_distance_m))
        cos_r0 = source_distance_m / std::sqrt(source_distance_m * source_distance_m + rho_x * rho_x + rho_y * rho_y);
    return cos_r0 + p.z / s;
}

KirchhoffResult kirchhoff(PhaseMap const& map,
                          double lambda_m,
                          double source_distance_m,
                          std::vector<ScreenPoint> const& points)
{
    if (!(lambda_m > 0))
        throw std::invalid_argument("kirchhoff: wavelength must be positive");
    if (!(source_distance_m > 0))
        throw std::invalid_argument("kirchhoff: source distance must be positive");
    KirchhoffResult res;
    OpenPixels const open = open_pixels(map);
    if (open.t.empty())
    {
        res.no_transmission = true;
        res.intensity.assign(points.size(), 0.0);
        return res;
    }
    Window const& w = map.window();
    double const area = w.pixel_area() * units::bohr_m * units::bohr_m;
    double const k = 2 * std::numbers::pi / lambda_m;
    bool const finite_src = std::isfinite(source_distance_m);
    double const r0 = source_distance_m;

    // Source leg is the same for every screen point.
    std::vector<double> d_r0(open.t.size(), 0.0), inv_r0(open.t.size(), 1.0), cos_r0(open.t.size(), 1.0);
    if (finite_src)
        for (std::size_t n = 0; n < open.t.size(); ++n)
        {
            double const rho2 = open.x[n] * open.x[n] + open.y[n] * open.y[n];
            double const big_r = std::sqrt(r0 * r0 + rho2);
            d_r0[n] = rho2 / (big_r + r0);
            inv_r0[n] = 1.0 / big_r;
            cos_r0[n] = r0 / big_r;
        }

    res.intensity.resize(points.size());
    for (std::size_t m = 0; m < points.size(); ++m)
    {
        ScreenPoint const& p = points[m];
        if (!(p.z > 0))
            throw std::invalid_argument("kirchhoff: screen points must lie downstream");
        double const r = std::sqrt(p.x * p.x + p.y * p.y + p.z * p.z);
        complex sum = 0;
        for (std::size_t n = 0; n < open.t.size(); ++n)
        {
            double const rho2 = open.x[n] * open.x[n] + open.y[n] * open.y[n];
            double const ds2 = rho2 - 2 * (p.x * open.x[n] + p.y * open.y[n]);  // s^2 - r^2
            double const s = std::sqrt(r * r + ds2);
            double const ds = ds2 / (s + r);
            double const obl = cos_r0[n] + p.z / s;
            sum += open.t[n] * std::polar(obl * inv_r0[n] / (2 * s), k * (d_r0[n] + ds));
        }
        // A k / (2 pi i) with A = 1.
        complex const psi = sum * area * k / (2 * std::numbers::pi * complex(0, 1));
        res.intensity[m] = std::norm(psi);
    }
    return res;
}

std::vector<SliceSample> pattern_slice(DiffractionPattern const& pattern, LineSpec const& line)
{
    double const len = std::hypot(line.x1 - line.x0, line.y1 - line.y0);
    if (!(len > 0) || line.samples < 2)
        throw std::invalid_argument("pattern_slice: degenerate line");
    if (pattern.no_transmission || pattern.nx() < 2 || pattern.ny() < 2)
        throw std::invalid_argument("pattern_slice: pattern has no samples");
    double const x_lo = pattern.x_m.front(), hx = pattern.x_m[1] - pattern.x_m[0];
    double const y_lo = pattern.y_m.front(), hy = pattern.y_m[1] - pattern.y_m[0];
    std::vector<SliceSample> out;
    bool inside = false;
    for (int n = 0; n < line.samples; ++n)
    {
        double const t = double(n) / (line.samples - 1);
        SliceSample s{t * len, line.x0 + t * (line.x1 - line.x0), line.y0 + t * (line.y1 - line.y0),
                      std::numeric_limits<double>::quiet_NaN()};
        double const fx = (s.x - x_lo) / hx, fy = (s.y - y_lo) / hy;
        if (fx >= 0 && fy >= 0 && fx <= pattern.nx() - 1 && fy <= pattern.ny() - 1)
        {
            int const i = std::min(int(fx), pattern.nx() - 2);
            int const j = std::min(int(fy), pattern.ny() - 2);
            double const ux = fx - i, uy = fy - j;
            s.intensity = (1 - ux) * (1 - uy) * pattern.at(i, j) + ux * (1 - uy) * pattern.at(i + 1, j)
                        + (1 - ux) * uy * pattern.at(i, j + 1) + ux * uy * pattern.at(i + 1, j + 1);
            inside = true;
        }
        out.push_back(s);
    }
    if (!inside)
        throw std::invalid_argument("pattern_slice: line misses the pattern");
    return out;
}

double slice_centroid(std::vector<SliceSample> const& slice)
{
    double w = 0, ws = 0;
    for (auto const& s : slice)
        if (!std::isnan(s.intensity))
        {
            w += s.intensity;
            ws += s.intensity * s.s;
        }
    if (!(w > 0))
        throw std::domain_error("slice_centroid: no intensity on the slice");
    return ws / w;
}

std::pair<double, double> angular_spread(DiffractionPattern const& p)
{
    if (p.no_transmission)
        throw std::domain_error("angular_spread: no transmission");
    double sw = 0, sx = 0, sy = 0;
    for (int j = 0; j < p.ny(); ++j)
        for (int i = 0; i < p.nx(); ++i)
        {
            double const v = p.at(i, j);
            sw += v;
            sx += v * p.x_m[i];
            sy += v * p.y_m[j];
        }
    double const mx = sx / sw, my = sy / sw;
    double vx = 0, vy = 0;
    for (int j = 0; j < p.ny(); ++j)
        for (int i = 0; i < p.nx(); ++i)
        {
            double const v = p.at(i, j);
            vx += v * (p.x_m[i] - mx) * (p.x_m[i] - mx);
            vy += v * (p.y_m[j] - my) * (p.y_m[j] - my);
        }
    return {std::sqrt(vx / sw) / p.distance_m, std::sqrt(vy / sw) / p.distance_m};
}

void write_pattern_csv(std::ostream& os, DiffractionPattern const& p)
{
    os << std::setprecision(17);
    os << "y\\x";
    for (double x : p.x_m)
        os << ',' << x;
    os << '\n';
    for (int j = 0; j < p.ny(); ++j)
    {
        os << p.y_m[j];
        for (int i = 0; i < p.nx(); ++i)
            os << ',' << p.at(i, j);
        os << '\n';
    }
}

void write_pattern_pgm(std::ostream& os, DiffractionPattern const& p)
{
    os << "P5\n" << p.nx() << ' ' << p.ny() << "\n65535\n";
    for (int j = p.ny() - 1; j >= 0; --j)
        for (int i = 0; i < p.nx(); ++i)
        {
            double const v = std::clamp(p.at(i, j), 0.0, 1.0);
            unsigned const value = unsigned(std::lround(65535.0 * v));
            os.put(char((value >> 8) & 0xff));
            os.put(char(value & 0xff));
        }
}

void write_pattern_json(std::ostream& os, DiffractionPattern const& p)
{
    nlohmann::ordered_json j;
    j["hole"] = p.hole_name;
    j["velocity_mps"] = p.velocity_mps;
    j["lambda_db_m"] = p.lambda_m;
    j["screen_distance_m"] = p.distance_m;
    if (std::isfinite(p.source_distance_m))
        j["source_distance_m"] = p.source_distance_m;
    else
        j["source_distance_m"] = "infinite";
    j["method"] = std::string(to_string(p.method));
    j["no_transmission"] = p.no_transmission;
    j["nx"] = p.nx();
    j["ny"] = p.ny();
    if (!p.no_transmission)
    {
        j["x_range_m"] = {p.x_m.front(), p.x_m.back()};
        j["y_range_m"] = {p.y_m.front(), p.y_m.back()};
    }
    j["k_perp_mapping"] = "k * (x / L, y / L), kernel exp(-i k_perp . rho)";
    j["peak_m4"] = p.peak;
    j["open_diameter_m"] = p.open_diameter_m;
    j["fresnel_number"] = p.fresnel_number;
    j["warnings"] = p.warnings;
    j["pgm_mapping"] = "round(65535 * intensity)";
    os << j.dump(2) << '\n';
}

void write_slice_csv(std::ostream& os, std::vector<SliceSample> const& slice)
{
    os << std::setprecision(17) << "s_m,x_m,y_m,intensity\n";
    for (auto const& s : slice)
        os << s.s << ',' << s.x << ',' << s.y << ',' << s.intensity << '\n';
}

}  // namespace mwd
