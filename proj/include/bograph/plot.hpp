#pragma once

#include <algorithm>
#include <complex>
#include <cstdio>
#include <string>
#include <vector>

namespace bograph {

namespace detail {

inline std::string fmt_double(double v, const char* spec = "%.12g") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), spec, v == 0.0 ? 0.0 : v);  // avoid "-0"
    return buf;
}

}  // namespace detail

/// re,im per row; byte-stable for a fixed eigenvalue list.
inline std::string eigen_csv(const std::vector<std::complex<double>>& eigenvalues) {
    std::string out = "re,im\n";
    for (const auto& z : eigenvalues)
        out += detail::fmt_double(z.real()) + "," + detail::fmt_double(z.imag()) + "\n";
    return out;
}

/// Self-contained 800x600 scatter of the eigenvalues over the complex plane
/// with the imaginary axis drawn through, the paper's stability-region view.
inline std::string eigen_svg(const std::vector<std::complex<double>>& eigenvalues) {
    const double width = 800.0, height = 600.0;
    const double margin = 60.0;
    double re_min = -1.0, re_max = 1.0, im_min = -1.0, im_max = 1.0;
    for (const auto& z : eigenvalues) {
        re_min = std::min(re_min, z.real());
        re_max = std::max(re_max, z.real());
        im_min = std::min(im_min, z.imag());
        im_max = std::max(im_max, z.imag());
    }
    double re_pad = 0.15 * (re_max - re_min);
    double im_pad = 0.15 * (im_max - im_min);
    re_min -= re_pad;
    re_max += re_pad;
    im_min -= im_pad;
    im_max += im_pad;
    auto x_of = [&](double re) {
        return margin + (re - re_min) / (re_max - re_min) * (width - 2 * margin);
    };
    auto y_of = [&](double im) {
        return height - margin - (im - im_min) / (im_max - im_min) * (height - 2 * margin);
    };
    auto f = [](double v) { return detail::fmt_double(v, "%.6g"); };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"600\" "
           "viewBox=\"0 0 800 600\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"600\" fill=\"white\"/>\n";
    // Frame
    svg += "<rect x=\"" + f(margin) + "\" y=\"" + f(margin) + "\" width=\"" +
           f(width - 2 * margin) + "\" height=\"" + f(height - 2 * margin) +
           "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";
    // Real axis (Im = 0) if visible
    if (im_min < 0.0 && im_max > 0.0)
        svg += "<line x1=\"" + f(margin) + "\" y1=\"" + f(y_of(0)) + "\" x2=\"" +
               f(width - margin) + "\" y2=\"" + f(y_of(0)) +
               "\" stroke=\"#bbb\" stroke-width=\"1\"/>\n";
    // Imaginary axis (Re = 0), the stability boundary
    if (re_min < 0.0 && re_max > 0.0)
        svg += "<line x1=\"" + f(x_of(0)) + "\" y1=\"" + f(margin) + "\" x2=\"" + f(x_of(0)) +
               "\" y2=\"" + f(height - margin) +
               "\" stroke=\"#333\" stroke-width=\"1.5\" stroke-dasharray=\"6,4\"/>\n";
    svg += "<text x=\"" + f(width - margin + 8) + "\" y=\"" + f(height - margin + 4) +
           "\" font-family=\"sans-serif\" font-size=\"16\">Re</text>\n";
    svg += "<text x=\"" + f(margin - 30) + "\" y=\"" + f(margin - 12) +
           "\" font-family=\"sans-serif\" font-size=\"16\">Im</text>\n";
    // Range labels
    svg += "<text x=\"" + f(margin) + "\" y=\"" + f(height - margin + 24) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + f(re_min) + "</text>\n";
    svg += "<text x=\"" + f(width - margin - 40) + "\" y=\"" + f(height - margin + 24) +
           "\" font-family=\"sans-serif\" font-size=\"12\">" + f(re_max) + "</text>\n";
    for (const auto& z : eigenvalues) {
        const char* color = z.real() < 0 ? "#2a7e2a" : (z.real() > 0 ? "#c23030" : "#c2a030");
        svg += "<circle cx=\"" + f(x_of(z.real())) + "\" cy=\"" + f(y_of(z.imag())) +
               "\" r=\"6\" fill=\"" + color + "\" fill-opacity=\"0.85\"/>\n";
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace bograph
