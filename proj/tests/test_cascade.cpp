#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <random>

#include "oracles.hpp"
#include "qqnet/cascade.hpp"
#include "qqnet/oriented.hpp"
#include "qqnet/parallel.hpp"

using namespace qqnet;

namespace {

NetworkConfig small_config() {
  NetworkConfig cfg;
  cfg.M = 4;
  cfg.num_layers = 4;
  cfg.sigma0_list = {1.0};
  cfg.r = 1.5;
  return cfg;
}

}  // namespace

TEST(NetworkConfig, Defaults) {
  const NetworkConfig cfg;
  EXPECT_EQ(cfg.M, 8);
  EXPECT_EQ(cfg.K, 3);
  EXPECT_EQ(cfg.num_layers, 4);
  EXPECT_EQ(cfg.channel_count(1), 8u);
  EXPECT_EQ(cfg.channel_count(2), 64u);
  EXPECT_EQ(cfg.channel_count(3), 64u);
  EXPECT_EQ(cfg.channel_count(4), 64u);
  EXPECT_EQ(cfg.layer_scale(1.0, 1), 1.0);
  EXPECT_EQ(cfg.layer_scale(1.0, 2), 4.0);
  EXPECT_EQ(cfg.layer_scale(1.0, 3), 16.0);
  EXPECT_EQ(cfg.layer_scale(1.0, 4), 64.0);
  EXPECT_DOUBLE_EQ(cfg.effective_sigma(1.0, 2), std::sqrt(5.0));
}

TEST(NetworkConfig, Validation) {
  auto bad = [](auto mutate) {
    NetworkConfig c;
    mutate(c);
    return c;
  };
  EXPECT_THROW(bad([](auto& c) { c.M = 1; }).validate(), InvalidArgument);
  EXPECT_THROW(bad([](auto& c) { c.K = 1; }).validate(), InvalidArgument);
  EXPECT_THROW(bad([](auto& c) { c.num_layers = 0; }).validate(), InvalidArgument);
  EXPECT_THROW(bad([](auto& c) { c.r = 1.0; }).validate(), InvalidArgument);
  EXPECT_THROW(bad([](auto& c) { c.sigma0_list = {0.4}; }).validate(), InvalidArgument);
  EXPECT_THROW(bad([](auto& c) { c.sigma0_list.clear(); }).validate(), InvalidArgument);
  EXPECT_THROW(bad([](auto& c) { c.qparams.C = -1; }).validate(), InvalidArgument);
  EXPECT_NO_THROW(NetworkConfig{}.validate());
}

TEST(ChannelLaw, MatchesEnumeration) {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    NetworkConfig cfg;
    cfg.M = 2 + static_cast<int>(rng() % 5);
    cfg.K = 2 + static_cast<int>(rng() % 3);
    cfg.num_layers = 1 + static_cast<int>(rng() % 5);
    const auto counts = oracle::enumerate_channel_counts(cfg);
    for (int k = 1; k <= cfg.num_layers; ++k) {
      EXPECT_EQ(cfg.channel_count(k), counts[static_cast<std::size_t>(k - 1)]);
      EXPECT_EQ(cfg.channel_count(k),
                static_cast<std::size_t>(std::pow(cfg.M, std::min(k, cfg.K - 1))));
    }
  }
}

TEST(OrientationTuple, IndexRoundTrip) {
  for (std::size_t i = 0; i < 64; ++i) EXPECT_EQ(tuple_to_index(index_to_tuple(i, 2, 8), 8), i);
  EXPECT_EQ(index_to_tuple(25, 2, 8).indices, (std::vector<int>{3, 1}));
  EXPECT_EQ(index_to_tuple(25, 2, 8).to_string(), "3-1");
  EXPECT_EQ(index_to_tuple(0, 0, 8).to_string(), "-");
}

TEST(Pooling, SumOfEqualPlanes) {
  const auto p = oracle::random_image(6, 5, 1);
  LayerMaps layer{2, 4.0, 8, 1, std::vector<ImagePlane>(8, p)};
  const auto pooled = pool_orientations(layer);
  EXPECT_EQ(pooled.arity, 0);
  ASSERT_EQ(pooled.channels.size(), 1u);
  for (std::size_t i = 0; i < p.size(); ++i)
    EXPECT_NEAR(pooled.channels[0].values()[i], 8.0 * p.values()[i], 1e-14);
}

TEST(Pooling, SingleOrientationIsIdentity) {
  const auto p = oracle::random_image(6, 5, 2);
  LayerMaps layer{1, 1.0, 1, 1, {p}};
  EXPECT_EQ(pool_orientations(layer).channels[0], p);
}

TEST(Pooling, OldestIndexAndPermutationInvariance) {
  const int M = 3;
  LayerMaps layer{2, 1.0, M, 2, {}};
  for (int i = 0; i < M * M; ++i) layer.channels.push_back(oracle::random_image(4, 4, 100 + i));
  const auto pooled = pool_orientations(layer);
  ASSERT_EQ(pooled.channels.size(), 3u);
  for (int b = 0; b < M; ++b) {
    ImagePlane expected(4, 4);
    for (int a = 0; a < M; ++a)
      for (std::size_t i = 0; i < expected.size(); ++i)
        expected.values()[i] += layer.channels[static_cast<std::size_t>(a * M + b)].values()[i];
    EXPECT_LT(oracle::max_abs_diff(pooled.channels[static_cast<std::size_t>(b)], expected), 1e-14);
  }
  LayerMaps shuffled = layer;
  for (int b = 0; b < M; ++b) std::swap(shuffled.channels[static_cast<std::size_t>(b)],
                                        shuffled.channels[static_cast<std::size_t>(2 * M + b)]);
  const auto pooled2 = pool_orientations(shuffled);
  for (int b = 0; b < M; ++b)
    EXPECT_LT(oracle::max_abs_diff(pooled.channels[static_cast<std::size_t>(b)],
                                   pooled2.channels[static_cast<std::size_t>(b)]), 1e-14);
  EXPECT_THROW(pool_orientations(pool_orientations(pooled)), InvalidArgument);
}

TEST(BuildNetwork, ShapeAndScales) {
  NetworkConfig cfg;
  cfg.sigma0_list = {1.0, 1.5};
  const auto img = oracle::random_image(40, 36, 3);
  const auto net = build_network(img, cfg);
  ASSERT_EQ(net.instances.size(), 2u);
  for (const auto& inst : net.instances) {
    EXPECT_EQ(inst.F0, smooth(img, inst.sigma0 * inst.sigma0));
    ASSERT_EQ(inst.layers.size(), 4u);
    for (int k = 1; k <= 4; ++k) {
      const auto& layer = inst.layers[static_cast<std::size_t>(k - 1)];
      EXPECT_EQ(layer.k, k);
      EXPECT_DOUBLE_EQ(layer.s, cfg.layer_scale(inst.sigma0, k));
      EXPECT_EQ(layer.channels.size(), cfg.channel_count(k));
      for (const auto& ch : layer.channels) {
        EXPECT_TRUE(ch.same_shape(img));
        for (double v : ch.values()) EXPECT_GE(v, 0.0);
      }
    }
  }
}

TEST(BuildNetwork, ConstantImageGivesZeroLayers) {
  NetworkConfig cfg = small_config();
  const auto net = build_network(ImagePlane(24, 24, 0.6), cfg);
  for (const auto& layer : net.instances[0].layers)
    for (const auto& ch : layer.channels)
      for (double v : ch.values()) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(BuildNetwork, LayersFollowRecurrence) {
  const NetworkConfig cfg = small_config();
  const auto img = oracle::random_image(32, 30, 4);
  const auto net = build_network(img, cfg);
  const auto& inst = net.instances[0];
  const OrientationSet set(cfg.M);
  const double s1 = cfg.layer_scale(1.0, 1);
  // Layer 1 differentiates the input image at s_1.
  const auto d1 = derivatives(img, s1, cfg.trunc_mult);
  for (int j = 0; j < cfg.M; ++j)
    EXPECT_EQ(inst.layers[0].channels[static_cast<std::size_t>(j)], oriented_qq(d1, set.angle(j), cfg.qparams));
  // Layer 2: channel (a, b) from F_1(a) at s_2.
  const double s2 = cfg.layer_scale(1.0, 2);
  for (int a = 0; a < cfg.M; ++a) {
    const auto d = derivatives(inst.layers[0].channels[static_cast<std::size_t>(a)], s2, cfg.trunc_mult);
    for (int b = 0; b < cfg.M; ++b)
      EXPECT_LT(oracle::max_abs_diff(inst.layers[1].channels[static_cast<std::size_t>(a * cfg.M + b)],
                                     oriented_qq(d, set.angle(b), cfg.qparams)), 1e-14);
  }
  // Layer 3 pools the oldest index of F_2 first.
  const double s3 = cfg.layer_scale(1.0, 3);
  const auto pooled = pool_orientations(inst.layers[1]);
  for (int b = 0; b < cfg.M; ++b) {
    const auto d = derivatives(pooled.channels[static_cast<std::size_t>(b)], s3, cfg.trunc_mult);
    for (int c = 0; c < cfg.M; ++c)
      EXPECT_LT(oracle::max_abs_diff(inst.layers[2].channels[static_cast<std::size_t>(b * cfg.M + c)],
                                     oriented_qq(d, set.angle(c), cfg.qparams)), 1e-14);
  }
}

TEST(BuildNetwork, ObserverSeesEveryChannel) {
  NetworkConfig cfg = small_config();
  cfg.num_layers = 3;
  std::atomic<std::size_t> visits{0};
  CascadeOptions opts;
  opts.keep_layers = false;
  opts.observer = [&](const ChannelVisit& v) {
    EXPECT_TRUE(v.q.same_shape(v.L_phi));
    ++visits;
  };
  const auto net = build_network(oracle::random_image(20, 20, 5), cfg, opts);
  EXPECT_EQ(visits.load(), 4u + 16u + 16u);
}

TEST(BuildNetwork, PostSmoothingApplied) {
  NetworkConfig cfg = small_config();
  cfg.num_layers = 1;
  cfg.post_smoothing = 0.5;
  const auto img = oracle::random_image(24, 24, 6);
  const auto net = build_network(img, cfg);
  const auto d = derivatives(img, 1.0, cfg.trunc_mult);
  EXPECT_LT(oracle::max_abs_diff(net.instances[0].layers[0].channels[1],
                                 post_smooth_qq(oriented_qq(d, OrientationSet(4).angle(1), cfg.qparams), 0.5)),
            1e-14);
}

TEST(BuildNetwork, DeterministicAcrossThreadCounts) {
  NetworkConfig cfg = small_config();
  cfg.sigma0_list = {1.0, 2.0};
  const auto img = oracle::random_image(30, 30, 7);
  set_thread_count(1);
  const auto a = build_network(img, cfg);
  set_thread_count(3);
  const auto b = build_network(img, cfg);
  set_thread_count(0);
  for (std::size_t i = 0; i < a.instances.size(); ++i)
    for (std::size_t k = 0; k < a.instances[i].layers.size(); ++k)
      EXPECT_EQ(a.instances[i].layers[k].channels, b.instances[i].layers[k].channels);
}

TEST(BuildNetwork, WarnsOnSmallImage) {
  NetworkConfig cfg;
  cfg.sigma0_list = {2.0};
  const auto net = build_network(oracle::random_image(32, 32, 8), cfg);
  EXPECT_FALSE(net.warnings.empty());
  EXPECT_THROW(build_network(ImagePlane(), cfg), InvalidArgument);
}
