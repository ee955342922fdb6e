#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "corikit/joints.hpp"
#include "corikit/spatial.hpp"
#include "corikit/tensor3.hpp"

namespace corikit {

struct ModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BodySpec {
  std::string name;
  int parent = -1;  // global body index, -1 = world
  JointSpec joint;
  InertialParams theta = InertialParams::Zero();
};

enum class ClusterType { single, geared_pair, belt_two_link, custom };

/// Hooks for user-defined multi-body cluster joints. All matrices follow
/// the stacked (6 n_bodies) layout; D may be left empty, in which case the
/// tensor Christoffel algorithm rejects the model.
struct CustomClusterHooks {
  int n_bodies = 0;
  int nv = 0;
  int nq = 0;
  // per local body: transform to the parent-cluster attach body frame
  std::function<std::vector<SpatialTransform>(const VecX& q)> x_attach;
  std::function<MatX(const VecX& q)> phi;
  std::function<MatX(const VecX& q, const VecX& v)> phi_ring;
  std::function<Tensor3(const VecX& q)> ring_gradient;  // (dPhiRing/dv)^T23, optional
};

/// Per-cluster kinematic quantities at a given (q, v).
struct ClusterKin {
  std::vector<SpatialTransform> X_attach;  // per local body, to parent attach frame
  MatX Phi;                                // 6n x nv
  MatX PhiRing;                            // 6n x nv
};

struct SpanningTree;

/// Mechanism description: bodies grouped into cluster joints forming a tree.
/// Immutable after finalize()/load; all evaluation methods are const and
/// reentrant.
class MechanismModel {
 public:
  struct Cluster {
    ClusterType type = ClusterType::single;
    std::vector<int> bodies;   // global indices, ascending and contiguous
    int parent = -1;           // parent cluster index, -1 = world
    int attach = 0;            // local body index within parent cluster
    int nv = 0, nq = 0;
    int v_offset = 0, q_offset = 0;
    double ratio = 1.0;        // geared_pair coupling
    std::shared_ptr<CustomClusterHooks> custom;
  };

  MechanismModel() = default;

  // --- construction ---
  int add_body(const BodySpec& spec);
  void couple_geared_pair(const std::string& first, const std::string& second, double ratio);
  void couple_belt_two_link(const std::string& first, const std::string& second);
  void add_custom_cluster(const std::vector<std::string>& names,
                          std::shared_ptr<CustomClusterHooks> hooks);
  void set_gravity(const Vec6& a_g) { gravity_ = a_g; }
  void set_name(const std::string& n) { name_ = n; }
  /// Groups bodies into clusters, assigns offsets, validates the tree.
  void finalize();

  // --- topology / sizes ---
  bool finalized() const { return finalized_; }
  int num_bodies() const { return static_cast<int>(bodies_.size()); }
  int num_clusters() const { return static_cast<int>(clusters_.size()); }
  int nv() const { return nv_; }
  int nq() const { return nq_; }
  int stacked_dim() const { return 6 * num_bodies(); }
  const std::string& name() const { return name_; }
  const Vec6& gravity() const { return gravity_; }
  const BodySpec& body(int b) const { return bodies_[b]; }
  const SpatialInertia& body_inertia(int b) const { return inertias_[b]; }
  const Cluster& cluster(int k) const { return clusters_[k]; }
  int cluster_of_body(int b) const { return body_cluster_[b]; }
  int body_index(const std::string& name) const;
  /// True when i is the cluster j or one of its ancestors.
  bool cluster_ancestor_or_self(int i, int j) const;
  bool is_open_chain() const;         // all clusters single-body
  bool is_coordinate_model() const;   // open chain with coordinate joints only

  // --- inertial parameters ---
  VecX theta_vector() const;  // 10 * num_bodies, body order
  MechanismModel with_theta(const VecX& theta) const;

  // --- per-cluster evaluation ---
  ClusterKin eval_cluster(int k, const Eigen::Ref<const VecX>& qk,
                          const Eigen::Ref<const VecX>& vk) const;
  bool cluster_has_ring_gradient(int k) const;
  /// D = (dPhiRing/dv)^T23, a (6n x nv x nv) tensor; throws if unavailable.
  Tensor3 cluster_ring_gradient(int k, const Eigen::Ref<const VecX>& qk) const;

  Eigen::Ref<const VecX> cluster_q(const VecX& q, int k) const {
    return q.segment(clusters_[k].q_offset, clusters_[k].nq);
  }
  Eigen::Ref<const VecX> cluster_v(const VecX& v, int k) const {
    return v.segment(clusters_[k].v_offset, clusters_[k].nv);
  }

  // --- configuration utilities ---
  VecX neutral_config() const;
  VecX config_rate(const VecX& q, const VecX& v) const;
  VecX integrate_config(const VecX& q, const VecX& v, double dt) const;
  void normalize_config(VecX& q) const;
  /// Throws if configuration dimensions or quaternion norms are off.
  void validate_config(const VecX& q, double quat_tol = 1e-10) const;

  // --- JSON model format ---
  static MechanismModel load(const std::string& path);
  void save(const std::string& path) const;
  static MechanismModel from_json_text(const std::string& text);
  std::string to_json_text() const;

  /// Spanning tree obtained by cutting multi-body cluster couplings.
  SpanningTree spanning_tree() const;

  bool numerically_equal(const MechanismModel& other) const;

 private:
  void validate() const;

  std::string name_;
  std::vector<BodySpec> bodies_;
  std::vector<SpatialInertia> inertias_;
  std::vector<Cluster> clusters_;
  std::vector<int> body_cluster_;
  Vec6 gravity_ = (Vec6() << 0, 0, 0, 0, 0, -9.81).finished();
  int nv_ = 0, nq_ = 0;
  bool finalized_ = false;

  struct Coupling {
    ClusterType type;
    int first, second;
    double ratio;
    std::shared_ptr<CustomClusterHooks> custom;
    std::vector<int> members;
  };
  std::vector<Coupling> couplings_;
};

/// Spanning-tree view of a cluster model: the couplings are cut, and the
/// constant map G relates minimal to spanning-tree velocities, v_tree = G v
/// (configurations map identically).
struct SpanningTree {
  MechanismModel model;
  MatX velocity_map;
};

}  // namespace corikit
