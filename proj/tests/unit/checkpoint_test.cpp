#include <doctest.h>

#include <fstream>

#include "fixtures.hpp"
#include "llpl/error.hpp"
#include "llpl/nn/checkpoint.hpp"

using namespace llpl;

TEST_CASE("checkpoint round trip is bit-exact") {
  const auto dir = testing::scratch_dir("ckpt");
  const auto model = nn::MlpModel::glorot({5, 64, 64, 1}, nn::Activation::kTanh, 9);
  nn::Normalizer n;
  n.mean = Eigen::VectorXd::LinSpaced(5, -1.0 / 3.0, 7.0 / 9.0);
  n.std = Eigen::VectorXd::Constant(5, 0.1);
  nn::write_checkpoint(dir / "with.ckpt", model, &n);
  nn::write_checkpoint(dir / "without.ckpt", model);

  const auto a = nn::read_checkpoint(dir / "with.ckpt");
  CHECK(a.model.layer_sizes() == model.layer_sizes());
  CHECK(a.model.activation() == model.activation());
  CHECK(a.model.flatten() == model.flatten());
  REQUIRE(a.normalizer);
  CHECK(a.normalizer->mean == n.mean);
  CHECK(a.normalizer->std == n.std);

  const auto b = nn::read_checkpoint(dir / "without.ckpt");
  CHECK(b.model.flatten() == model.flatten());
  CHECK_FALSE(b.normalizer);
}

TEST_CASE("checkpoint errors") {
  const auto dir = testing::scratch_dir("ckpt_err");
  try {
    nn::read_checkpoint(dir / "absent.ckpt");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kMissingArtifact);
  }
  std::ofstream(dir / "bad.ckpt") << "llpl-mlp v1\n5 4 1\ntanh\n1 2 3\n";
  try {
    nn::read_checkpoint(dir / "bad.ckpt");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kIo);
  }
}
