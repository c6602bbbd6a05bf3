#pragma once

#include "mwd/eikonal.hpp"

#include <complex>
#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace mwd
{

/*!
 * Screen sampling for the Fraunhofer pattern.
 *
 * The screen point (x, y) at distance L maps to k_perp = k (x/L, y/L). Samples
 * sit on the bins of the zero-padded transform, k_p = 2 pi p / (padding * nx * dx),
 * taken every `stride` bins and cropped to |x|, |y| <= half_width.
 */
struct ScreenSpec
{
    double distance_m{1.0};
    int padding{4};
    //! Crop half width on the screen (m); 0 picks 8 lambda / D_open radians.
    double half_width_m{0};
    //! Stride is increased until each axis has at most this many samples.
    int max_samples{513};
};

enum class FarfieldMethod
{
    fft,
    direct,
};

std::string_view to_string(FarfieldMethod m);
FarfieldMethod parse_farfield_method(std::string_view s);

struct DiffractionPattern
{
    std::vector<double> intensity;  //!< row-major, y slow; max 1
    std::vector<double> x_m, y_m;   //!< screen axes
    double distance_m{1.0};
    double lambda_m{0};
    double source_distance_m{std::numeric_limits<double>::infinity()};
    double velocity_mps{0};
    std::string hole_name;
    FarfieldMethod method{FarfieldMethod::fft};
    //! |A|^2 at the brightest sample before normalisation (m^4).
    double peak{0};
    double fresnel_number{0};
    double open_diameter_m{0};
    bool no_transmission{false};
    std::vector<std::string> warnings;

    int nx() const { return int(x_m.size()); }
    int ny() const { return int(y_m.size()); }
    double at(int i, int j) const { return intensity[std::size_t(j) * x_m.size() + i]; }
};

/*!
 * |sum T(rho) exp(-i k_perp . rho) dA|^2 on the screen, normalised to unit
 * maximum. The sign is that of the far-field limit of the Kirchhoff path
 * length, s ~ r - (x, y) . rho / L. A fully blocked map gives
 * `no_transmission` and no samples.
 */
DiffractionPattern fraunhofer(PhaseMap const& map,
                              double lambda_m,
                              ScreenSpec const& screen = {},
                              FarfieldMethod method = FarfieldMethod::fft);

//! Phase map from callables in bohr: open(x, y) and phase(x, y); no phase means 0.
PhaseMap make_phase_map(Window const& window,
                        std::function<bool(double, double)> const& open,
                        std::function<double(double, double)> const& phase = {},
                        double velocity_mps = 20000);

//! Aperture integral at a single transverse wavevector (rad/m), in m^2.
std::complex<double> fraunhofer_amplitude(PhaseMap const& map, double kx, double ky);

struct ScreenPoint
{
    double x, y, z;  //!< m, aperture plane at z = 0
};

struct KirchhoffResult
{
    std::vector<double> intensity;  //!< |Psi / A|^2 per point
    bool no_transmission{false};
};

/*!
 * Kirchhoff integral for a point source on the axis at z = -r0, with the
 * obliquity factor [cos(n, r0) - cos(n, s)] and n pointing back at the source.
 * Path-length differences are formed without cancellation.
 */
KirchhoffResult kirchhoff(PhaseMap const& map,
                          double lambda_m,
                          double source_distance_m,
                          std::vector<ScreenPoint> const& points);

//! Obliquity factor for source (0, 0, -r0), aperture point rho and screen point p.
double obliquity(double source_distance_m, double rho_x, double rho_y, ScreenPoint const& p);

struct LineSpec
{
    double x0, y0, x1, y1;  //!< m
    int samples{256};
};

struct SliceSample
{
    double s;  //!< m from (x0, y0)
    double x, y;
    double intensity;  //!< NaN outside the pattern
};

//! Bilinear samples along a straight line.
std::vector<SliceSample> pattern_slice(DiffractionPattern const& pattern, LineSpec const& line);

//! Intensity-weighted mean of `s` over the samples inside the pattern.
double slice_centroid(std::vector<SliceSample> const& slice);

//! RMS angular spread along x and y about the intensity centroid (rad).
std::pair<double, double> angular_spread(DiffractionPattern const& pattern);

// Grid CSV: first row "y\x" then x samples in m; one row per y.
void write_pattern_csv(std::ostream& os, DiffractionPattern const& p);
//! 16-bit PGM, round(65535 * intensity); top row is the largest y.
void write_pattern_pgm(std::ostream& os, DiffractionPattern const& p);
void write_pattern_json(std::ostream& os, DiffractionPattern const& p);
// "s_m,x_m,y_m,intensity"
void write_slice_csv(std::ostream& os, std::vector<SliceSample> const& slice);

}  // namespace mwd
