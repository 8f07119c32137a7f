#pragma once

#include <string>
#include <string_view>

namespace pss::svg {

// Minimal SVG 1.1 writer. Coordinates are printed with two decimals so the
// output is byte-stable for identical input.
class Document {
 public:
  Document(double width, double height);

  void rect(double x, double y, double w, double h, std::string_view fill, std::string_view stroke = "none");
  void line(double x1, double y1, double x2, double y2, std::string_view stroke, double width = 1.0);
  // anchor: start | middle | end
  void text(double x, double y, std::string_view content, double size = 12, std::string_view anchor = "start",
            std::string_view fill = "#222", bool bold = false);
  void vertical_text(double x, double y, std::string_view content, double size = 12);

  std::string str() const;

 private:
  double width_, height_;
  std::string body_;
};

std::string escape(std::string_view text);

// Sequential single-hue color for t in [0,1] (white to dark blue).
std::string blue_scale(double t);

}  // namespace pss::svg
