// Writes a synthetic pupil/iris boundary point set in pixel coordinates:
// two concentric rings in a 320 x 290 image with 100 and 150 edge points
// and one pixel of Gaussian edge jitter. Fit it with --f0 100.
//
//   make_iris_like data/iris_like.csv

#include <concentric/point_io.hpp>
#include <concentric/simulation.hpp>

#include <fstream>
#include <iostream>
#include <numbers>

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_iris_like OUTPUT.csv\n";
    return 2;
  }
  concentric::Scenario s;
  s.geometry = {160.0, 145.0, {{32.0, 28.0}, {80.0, 70.0}}, 0.3};
  s.arc_start = 0.0;
  s.arc_end = 2.0 * std::numbers::pi;
  s.counts = {100, 150};
  s.f0 = 100.0;

  const auto points = concentric::add_noise(concentric::generate_true_points(s), {1.0, 20240611});
  std::ofstream out(argv[1]);
  if (!out) {
    std::cerr << "cannot write " << argv[1] << '\n';
    return 2;
  }
  concentric::write_points(out, points);
  return out ? 0 : 2;
}
