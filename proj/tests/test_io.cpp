#include <gtest/gtest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>

#include "elliptica/io.hpp"
#include "elliptica/radial_solver.hpp"

using namespace elliptica;

namespace {

RadialProfile small_profile() {
  ShootingParams sp;
  sp.dim = 4;
  sp.center_value = 1.0;
  sp.r_max = 5.0;
  return shoot(make_power(3.0), sp);
}

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("elliptica_io_" + name)).string();
}

}  // namespace

TEST(ProfileIo, JsonRoundTripIsExact) {
  auto p = small_profile();
  auto q = profile_from_json(Json::parse(to_json(p).dump()));
  EXPECT_EQ(q.dim(), p.dim());
  EXPECT_EQ(q.id(), p.id());
  EXPECT_EQ(q.r(), p.r());
  EXPECT_EQ(q.u(), p.u());
  EXPECT_EQ(q.du(), p.du());
  EXPECT_EQ(to_json(q).dump(), to_json(p).dump());
}

TEST(ProfileIo, CsvRoundTripIsExact) {
  auto p = small_profile();
  auto q = profile_from_csv(profile_csv(p), 4);
  EXPECT_EQ(q.r(), p.r());
  EXPECT_EQ(q.u(), p.u());
  EXPECT_EQ(q.du(), p.du());
}

TEST(ProfileIo, SchemaAndFormatErrors) {
  auto j = to_json(small_profile());
  j["schema"] = "something-else";
  EXPECT_THROW(profile_from_json(j), FormatError);
  auto k = to_json(small_profile());
  k.erase("u");
  EXPECT_THROW(profile_from_json(k), FormatError);
  EXPECT_THROW(profile_from_csv("x,y\n1,2\n", 3), FormatError);
  EXPECT_THROW(profile_from_csv("r,u,du\n0,1\n", 3), FormatError);
  EXPECT_THROW(profile_from_csv("r,u,du\n0,a,0\n", 3), FormatError);
}

TEST(ProfileIo, NonFiniteBecomesNull) {
  EXPECT_TRUE(detail::num(std::numeric_limits<double>::infinity()).is_null());
  EXPECT_TRUE(std::isnan(detail::num_or_nan(Json(nullptr))));
}

TEST(GridIo, JsonRoundTrip) {
  auto g = sample_grid(Box{1.0, 0.5}, BoundaryCondition::Neumann0, 1.0 / 64.0,
                       [](double x, double y) { return x * y + 1.0; }, "box");
  g.cx = 0.25;
  auto j = to_json(g);
  EXPECT_EQ(j["schema"], kProfileSchema);
  EXPECT_EQ(j["kind"], "grid2d");
  auto h = grid_from_json(Json::parse(j.dump()));
  EXPECT_EQ(h.nx, g.nx);
  EXPECT_EQ(h.ny, g.ny);
  EXPECT_EQ(h.cx, g.cx);
  EXPECT_EQ(h.bc, g.bc);
  EXPECT_EQ(h.u, g.u);
  EXPECT_EQ(h.inside, g.inside);
  EXPECT_EQ(grid_csv(h), grid_csv(g));
}

TEST(SpectralIo, RoundTrip) {
  SpectralReport r;
  r.dim = 3;
  r.profile_id = "x";
  r.radii = {1.0, 2.0};
  r.lambda1 = {0.5, std::numeric_limits<double>::quiet_NaN()};
  r.neg_count = {0, 1};
  r.grid_resolution = 512;
  r.stable_outside_radius = 3.0;
  auto j = to_json(r);
  EXPECT_EQ(j["schema"], kSpectralSchema);
  auto s = spectral_from_json(Json::parse(j.dump()));
  EXPECT_EQ(s.radii, r.radii);
  EXPECT_EQ(s.lambda1[0], 0.5);
  EXPECT_TRUE(std::isnan(s.lambda1[1]));
  EXPECT_EQ(s.neg_count, r.neg_count);
  EXPECT_EQ(*s.stable_outside_radius, 3.0);
  EXPECT_THROW(spectral_from_json(to_json(small_profile())), FormatError);
}

TEST(DecayIo, TableAppendsWithSingleHeader) {
  auto path = temp_path("decay.csv");
  std::remove(path.c_str());
  DecayFit f;
  f.profile_id = "p";
  f.exponent = -1.0;
  f.bound = -0.5;
  append_decay_table(path, {f});
  append_decay_table(path, {f, f});
  auto text = read_text(path);
  EXPECT_EQ(text.rfind(decay_csv_header(), 0), 0u);
  EXPECT_EQ(text.find(decay_csv_header(), 1), std::string::npos);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 4);
  std::remove(path.c_str());
}

TEST(Files, ReadJsonErrors) {
  auto path = temp_path("bad.json");
  write_text(path, "{not json");
  EXPECT_THROW(read_json(path), FormatError);
  std::remove(path.c_str());
  EXPECT_THROW(read_text(temp_path("missing.json")), std::runtime_error);
}

TEST(Catalog, ListsEveryEntry) {
  auto c = catalog_json();
  EXPECT_EQ(c.size(), list_entries().size());
  for (const auto& e : c) EXPECT_TRUE(e.contains("label"));
}
