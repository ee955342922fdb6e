#include "corikit/model.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace corikit {

using nlohmann::json;

int MechanismModel::add_body(const BodySpec& spec) {
  if (finalized_) throw ModelError("model already finalized");
  if (spec.parent >= static_cast<int>(bodies_.size()))
    throw ModelError("body '" + spec.name + "': parent index must precede the body");
  for (const auto& b : bodies_)
    if (b.name == spec.name) throw ModelError("duplicate body name '" + spec.name + "'");
  bodies_.push_back(spec);
  inertias_.push_back(SpatialInertia::FromParams(spec.theta));
  return static_cast<int>(bodies_.size()) - 1;
}

int MechanismModel::body_index(const std::string& name) const {
  for (int i = 0; i < num_bodies(); ++i)
    if (bodies_[i].name == name) return i;
  throw ModelError("unknown body '" + name + "'");
}

void MechanismModel::couple_geared_pair(const std::string& first, const std::string& second,
                                        double ratio) {
  couplings_.push_back({ClusterType::geared_pair, body_index(first), body_index(second), ratio,
                        nullptr, {}});
}

void MechanismModel::couple_belt_two_link(const std::string& first, const std::string& second) {
  couplings_.push_back({ClusterType::belt_two_link, body_index(first), body_index(second), 1.0,
                        nullptr, {}});
}

void MechanismModel::add_custom_cluster(const std::vector<std::string>& names,
                                        std::shared_ptr<CustomClusterHooks> hooks) {
  Coupling c{ClusterType::custom, -1, -1, 1.0, std::move(hooks), {}};
  for (const auto& n : names) c.members.push_back(body_index(n));
  couplings_.push_back(std::move(c));
}

void MechanismModel::finalize() {
  if (finalized_) return;
  if (bodies_.empty()) throw ModelError("model has no bodies");

  // Assign each body to a coupling (or a singleton cluster), preserving order.
  std::vector<int> coupling_of(bodies_.size(), -1);
  for (size_t c = 0; c < couplings_.size(); ++c) {
    std::vector<int> members = couplings_[c].members;
    if (couplings_[c].type != ClusterType::custom)
      members = {couplings_[c].first, couplings_[c].second};
    couplings_[c].members = members;
    for (int b : members) {
      if (coupling_of[b] != -1) throw ModelError("body in more than one cluster coupling");
      coupling_of[b] = static_cast<int>(c);
    }
  }

  body_cluster_.assign(bodies_.size(), -1);
  clusters_.clear();
  for (int b = 0; b < num_bodies(); ++b) {
    if (body_cluster_[b] != -1) continue;
    Cluster cl;
    if (coupling_of[b] == -1) {
      cl.type = ClusterType::single;
      cl.bodies = {b};
      cl.nv = joint_nv(bodies_[b].joint.kind);
      cl.nq = joint_nq(bodies_[b].joint.kind);
    } else {
      const Coupling& cp = couplings_[coupling_of[b]];
      cl.type = cp.type;
      cl.bodies = cp.members;
      cl.ratio = cp.ratio;
      cl.custom = cp.custom;
      if (cp.members.front() != b)
        throw ModelError("cluster bodies must be listed in ascending index order");
      for (size_t i = 1; i < cp.members.size(); ++i)
        if (cp.members[i] != cp.members[i - 1] + 1)
          throw ModelError("cluster bodies must be contiguous in the body array");
      switch (cl.type) {
        case ClusterType::geared_pair:
          cl.nv = 1;
          cl.nq = 1;
          break;
        case ClusterType::belt_two_link:
          cl.nv = 2;
          cl.nq = 2;
          break;
        case ClusterType::custom:
          cl.nv = cl.custom->nv;
          cl.nq = cl.custom->nq;
          break;
        default: throw ModelError("bad cluster type");
      }
    }
    const int k = static_cast<int>(clusters_.size());
    for (int m : cl.bodies) body_cluster_[m] = k;
    clusters_.push_back(cl);
  }

  // Parent cluster and attach point: taken from the first body's parent.
  // Any other external parents must resolve to the same cluster.
  nv_ = nq_ = 0;
  for (auto& cl : clusters_) {
    int parent_body = bodies_[cl.bodies.front()].parent;
    if (parent_body == -1) {
      cl.parent = -1;
      cl.attach = 0;
    } else {
      cl.parent = body_cluster_[parent_body];
      const auto& pb = clusters_[cl.parent].bodies;
      cl.attach = static_cast<int>(std::find(pb.begin(), pb.end(), parent_body) - pb.begin());
    }
    for (int b : cl.bodies) {
      const int p = bodies_[b].parent;
      if (p != -1 && body_cluster_[p] != cl.parent && body_cluster_[p] != body_cluster_[b])
        throw ModelError("cluster body parented outside parent cluster");
    }
    cl.v_offset = nv_;
    cl.q_offset = nq_;
    nv_ += cl.nv;
    nq_ += cl.nq;
  }

  finalized_ = true;
  validate();
}

void MechanismModel::validate() const {
  for (int b = 0; b < num_bodies(); ++b) {
    const auto& joint = bodies_[b].joint;
    if (bodies_[b].parent >= b) throw ModelError("parent array is not topological");
    if (bodies_[b].theta[0] < 0.0) throw ModelError("negative mass");
    if (joint.offset.rotation_defect() > 1e-12)
      throw ModelError("joint offset rotation is not in SO(3)");
    const bool needs_axis = joint.kind == JointKind::revolute ||
                            joint.kind == JointKind::prismatic ||
                            joint.kind == JointKind::helical;
    if (needs_axis && joint.axis.norm() < 1e-12)
      throw ModelError("joint axis must be nonzero");
  }
  for (int k = 0; k < num_clusters(); ++k) {
    if (clusters_[k].parent >= k) throw ModelError("cluster tree is not topological");
    if (clusters_[k].type == ClusterType::geared_pair) {
      const auto& bs = clusters_[k].bodies;
      if (bodies_[bs[0]].parent != bodies_[bs[1]].parent)
        throw ModelError("geared pair bodies must share a parent");
      if (bodies_[bs[0]].joint.kind != JointKind::revolute ||
          bodies_[bs[1]].joint.kind != JointKind::revolute)
        throw ModelError("geared pair requires revolute members");
    }
    if (clusters_[k].type == ClusterType::belt_two_link) {
      const auto& bs = clusters_[k].bodies;
      if (bodies_[bs[1]].parent != bs[0])
        throw ModelError("belt cluster: second body must be a child of the first");
      if (bodies_[bs[0]].joint.kind != JointKind::revolute ||
          bodies_[bs[1]].joint.kind != JointKind::revolute)
        throw ModelError("belt cluster requires revolute members");
    }
  }
  // Phi must have full column rank; probed at a handful of configurations.
  VecX q = neutral_config();
  for (int trial = 0; trial < 4; ++trial) {
    for (int k = 0; k < num_clusters(); ++k) {
      const auto kin = eval_cluster(k, cluster_q(q, k), VecX::Zero(clusters_[k].nv));
      Eigen::JacobiSVD<MatX> svd(kin.Phi);
      if (svd.rank() < clusters_[k].nv) throw ModelError("rank-deficient joint subspace");
    }
    q = integrate_config(q, VecX::Constant(nv_, 0.37 + 0.21 * trial), 1.0);
  }
}

bool MechanismModel::cluster_ancestor_or_self(int i, int j) const {
  for (int k = j; k != -1; k = clusters_[k].parent)
    if (k == i) return true;
  return false;
}

bool MechanismModel::is_open_chain() const {
  return std::all_of(clusters_.begin(), clusters_.end(),
                     [](const Cluster& c) { return c.type == ClusterType::single; });
}

bool MechanismModel::is_coordinate_model() const {
  if (!is_open_chain()) return false;
  return std::all_of(bodies_.begin(), bodies_.end(),
                     [](const BodySpec& b) { return joint_is_coordinate(b.joint.kind); });
}

VecX MechanismModel::theta_vector() const {
  VecX theta(10 * num_bodies());
  for (int b = 0; b < num_bodies(); ++b) theta.segment<10>(10 * b) = bodies_[b].theta;
  return theta;
}

MechanismModel MechanismModel::with_theta(const VecX& theta) const {
  if (theta.size() != 10 * num_bodies()) throw ModelError("theta size mismatch");
  MechanismModel out = *this;
  for (int b = 0; b < num_bodies(); ++b) {
    out.bodies_[b].theta = theta.segment<10>(10 * b);
    out.inertias_[b] = SpatialInertia::FromParams(out.bodies_[b].theta);
  }
  return out;
}

ClusterKin MechanismModel::eval_cluster(int k, const Eigen::Ref<const VecX>& qk,
                                        const Eigen::Ref<const VecX>& vk) const {
  const Cluster& cl = clusters_[k];
  ClusterKin out;
  switch (cl.type) {
    case ClusterType::single: {
      const JointSpec& j = bodies_[cl.bodies[0]].joint;
      out.X_attach = {joint_transform(j, qk)};
      out.Phi = joint_motion_subspace(j, qk);
      out.PhiRing = MatX::Zero(6, cl.nv);
      return out;
    }
    case ClusterType::geared_pair: {
      const JointSpec& j1 = bodies_[cl.bodies[0]].joint;
      const JointSpec& j2 = bodies_[cl.bodies[1]].joint;
      const VecX q2 = (VecX(1) << cl.ratio * qk[0]).finished();
      out.X_attach = {joint_transform(j1, qk), joint_transform(j2, q2)};
      out.Phi = MatX::Zero(12, 1);
      out.Phi.block<6, 1>(0, 0) = joint_motion_subspace(j1, qk);
      out.Phi.block<6, 1>(6, 0) = cl.ratio * joint_motion_subspace(j2, q2);
      out.PhiRing = MatX::Zero(12, 1);
      return out;
    }
    case ClusterType::belt_two_link: {
      const JointSpec& j1 = bodies_[cl.bodies[0]].joint;
      const JointSpec& j2 = bodies_[cl.bodies[1]].joint;
      const VecX g2 = (VecX(1) << qk[1] - qk[0]).finished();
      const SpatialTransform X1 = joint_transform(j1, qk.head(1));
      const SpatialTransform X21 = joint_transform(j2, g2);
      const MatX phi1 = joint_motion_subspace(j1, qk.head(1));
      const MatX phi2 = joint_motion_subspace(j2, g2);
      out.X_attach = {X1, X21 * X1};
      out.Phi = MatX::Zero(12, 2);
      out.Phi.block<6, 1>(0, 0) = phi1;
      out.Phi.block<6, 1>(6, 0) = X21.motion_matrix() * phi1 - phi2;
      out.Phi.block<6, 1>(6, 1) = phi2;
      out.PhiRing = MatX::Zero(12, 2);
      const double g2dot = vk[1] - vk[0];
      out.PhiRing.block<6, 1>(6, 0) =
          -g2dot * cross_motion(phi2.col(0)) * (X21.motion_matrix() * phi1);
      return out;
    }
    case ClusterType::custom: {
      out.X_attach = cl.custom->x_attach(qk);
      out.Phi = cl.custom->phi(qk);
      out.PhiRing = cl.custom->phi_ring ? cl.custom->phi_ring(qk, vk)
                                        : MatX::Zero(6 * cl.custom->n_bodies, cl.nv);
      return out;
    }
  }
  throw std::logic_error("bad cluster type");
}

bool MechanismModel::cluster_has_ring_gradient(int k) const {
  const Cluster& cl = clusters_[k];
  if (cl.type == ClusterType::custom) return static_cast<bool>(cl.custom->ring_gradient);
  return true;
}

Tensor3 MechanismModel::cluster_ring_gradient(int k, const Eigen::Ref<const VecX>& qk) const {
  const Cluster& cl = clusters_[k];
  switch (cl.type) {
    case ClusterType::single:
      return Tensor3::Zero(6, cl.nv, cl.nv);
    case ClusterType::geared_pair:
      return Tensor3::Zero(12, 1, 1);
    case ClusterType::belt_two_link: {
      // PhiRing is linear in v: raw pages are PhiRing evaluated at unit v,
      // then columns and pages are swapped.
      Tensor3 raw(12, 2, 2);
      for (int p = 0; p < 2; ++p) {
        const auto kin = eval_cluster(k, qk, VecX::Unit(2, p));
        raw.page(p) = kin.PhiRing;
      }
      return raw.transpose23();
    }
    case ClusterType::custom:
      if (!cl.custom->ring_gradient)
        throw ModelError("custom cluster does not supply a ring gradient tensor");
      return cl.custom->ring_gradient(qk);
  }
  throw std::logic_error("bad cluster type");
}

VecX MechanismModel::neutral_config() const {
  VecX q = VecX::Zero(nq_);
  for (const auto& cl : clusters_) {
    if (cl.type == ClusterType::single) {
      q.segment(cl.q_offset, cl.nq) = joint_neutral_config(bodies_[cl.bodies[0]].joint.kind);
    }
    // multi-body built-ins are scalar-coordinate, zeros are fine
  }
  return q;
}

VecX MechanismModel::config_rate(const VecX& q, const VecX& v) const {
  VecX qd = VecX::Zero(nq_);
  for (int k = 0; k < num_clusters(); ++k) {
    const Cluster& cl = clusters_[k];
    if (cl.type == ClusterType::single) {
      qd.segment(cl.q_offset, cl.nq) = joint_config_rate(
          bodies_[cl.bodies[0]].joint, cluster_q(q, k), cluster_v(v, k));
    } else {
      qd.segment(cl.q_offset, cl.nq) = cluster_v(v, k);  // scalar-coordinate clusters
    }
  }
  return qd;
}

VecX MechanismModel::integrate_config(const VecX& q, const VecX& v, double dt) const {
  VecX out = VecX::Zero(nq_);
  for (int k = 0; k < num_clusters(); ++k) {
    const Cluster& cl = clusters_[k];
    if (cl.type == ClusterType::single) {
      out.segment(cl.q_offset, cl.nq) = joint_integrate(
          bodies_[cl.bodies[0]].joint, cluster_q(q, k), cluster_v(v, k), dt);
    } else {
      out.segment(cl.q_offset, cl.nq) = cluster_q(q, k) + dt * cluster_v(v, k);
    }
  }
  return out;
}

void MechanismModel::normalize_config(VecX& q) const {
  for (int k = 0; k < num_clusters(); ++k) {
    const Cluster& cl = clusters_[k];
    if (cl.type == ClusterType::single)
      joint_normalize(bodies_[cl.bodies[0]].joint.kind, q.segment(cl.q_offset, cl.nq));
  }
}

void MechanismModel::validate_config(const VecX& q, double quat_tol) const {
  if (q.size() != nq_) throw ModelError("configuration dimension mismatch");
  for (int k = 0; k < num_clusters(); ++k) {
    const Cluster& cl = clusters_[k];
    if (cl.type != ClusterType::single) continue;
    const double defect = joint_config_defect(bodies_[cl.bodies[0]].joint.kind, cluster_q(q, k));
    if (defect > quat_tol) throw ModelError("quaternion norm defect exceeds tolerance");
  }
}

// --- JSON ------------------------------------------------------------------

namespace {

const char* kind_name(JointKind k) {
  switch (k) {
    case JointKind::revolute: return "revolute";
    case JointKind::prismatic: return "prismatic";
    case JointKind::helical: return "helical";
    case JointKind::spherical: return "spherical";
    case JointKind::free_joint: return "free";
    case JointKind::translational: return "translational";
  }
  return "?";
}

JointKind kind_from_name(const std::string& s) {
  if (s == "revolute") return JointKind::revolute;
  if (s == "prismatic") return JointKind::prismatic;
  if (s == "helical") return JointKind::helical;
  if (s == "spherical") return JointKind::spherical;
  if (s == "free") return JointKind::free_joint;
  if (s == "translational") return JointKind::translational;
  throw ModelError("unknown joint kind '" + s + "'");
}

Vec3 read_vec3(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ModelError("expected a 3-vector");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

}  // namespace

MechanismModel MechanismModel::from_json_text(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ModelError(std::string("model JSON parse error: ") + e.what());
  }
  MechanismModel model;
  if (root.contains("name")) model.set_name(root["name"].get<std::string>());
  if (root.contains("gravity")) {
    const auto& g = root["gravity"];
    if (!g.is_array() || g.size() != 6) throw ModelError("gravity must be a 6-vector");
    Vec6 ag;
    for (int i = 0; i < 6; ++i) ag[i] = g[i].get<double>();
    model.set_gravity(ag);
  }
  if (!root.contains("bodies") || !root["bodies"].is_array() || root["bodies"].empty())
    throw ModelError("model must define a non-empty bodies array");

  for (const auto& jb : root["bodies"]) {
    BodySpec spec;
    spec.name = jb.at("name").get<std::string>();
    const std::string parent = jb.at("parent").get<std::string>();
    spec.parent = (parent == "world") ? -1 : model.body_index(parent);
    const auto& jj = jb.at("joint");
    spec.joint.kind = kind_from_name(jj.at("kind").get<std::string>());
    if (jj.contains("axis")) spec.joint.axis = read_vec3(jj["axis"]);
    if (jj.contains("pitch")) spec.joint.pitch = jj["pitch"].get<double>();
    if (jj.contains("offset")) {
      const auto& jo = jj["offset"];
      Vec3 xyz = Vec3::Zero(), rpy = Vec3::Zero();
      if (jo.contains("xyz")) xyz = read_vec3(jo["xyz"]);
      if (jo.contains("rpy")) rpy = read_vec3(jo["rpy"]);
      spec.joint.set_offset(xyz, rpy);
    }
    const auto& th = jb.at("inertia").at("theta");
    if (!th.is_array() || th.size() != 10) throw ModelError("inertia.theta must have 10 entries");
    for (int i = 0; i < 10; ++i) spec.theta[i] = th[i].get<double>();
    model.add_body(spec);
  }

  if (root.contains("clusters")) {
    for (const auto& jc : root["clusters"]) {
      const std::string type = jc.at("type").get<std::string>();
      const auto& names = jc.at("bodies");
      if (!names.is_array() || names.size() != 2)
        throw ModelError("cluster must name exactly two bodies");
      if (type == "geared_pair") {
        model.couple_geared_pair(names[0].get<std::string>(), names[1].get<std::string>(),
                                 jc.at("ratio").get<double>());
      } else if (type == "belt_two_link") {
        model.couple_belt_two_link(names[0].get<std::string>(), names[1].get<std::string>());
      } else {
        throw ModelError("unknown cluster type '" + type + "'");
      }
    }
  }
  model.finalize();
  return model;
}

std::string MechanismModel::to_json_text() const {
  json root;
  root["name"] = name_;
  root["gravity"] = std::vector<double>(gravity_.data(), gravity_.data() + 6);
  root["bodies"] = json::array();
  for (const auto& b : bodies_) {
    json jb;
    jb["name"] = b.name;
    jb["parent"] = (b.parent == -1) ? std::string("world") : bodies_[b.parent].name;
    json jj;
    jj["kind"] = kind_name(b.joint.kind);
    jj["axis"] = {b.joint.axis.x(), b.joint.axis.y(), b.joint.axis.z()};
    if (b.joint.kind == JointKind::helical) jj["pitch"] = b.joint.pitch;
    jj["offset"] = {{"xyz", {b.joint.offset_xyz.x(), b.joint.offset_xyz.y(), b.joint.offset_xyz.z()}},
                    {"rpy", {b.joint.offset_rpy.x(), b.joint.offset_rpy.y(), b.joint.offset_rpy.z()}}};
    jb["joint"] = jj;
    jb["inertia"] = {{"theta", std::vector<double>(b.theta.data(), b.theta.data() + 10)}};
    root["bodies"].push_back(jb);
  }
  root["clusters"] = json::array();
  for (const auto& cl : clusters_) {
    if (cl.type == ClusterType::single) continue;
    json jc;
    jc["bodies"] = {bodies_[cl.bodies[0]].name, bodies_[cl.bodies[1]].name};
    if (cl.type == ClusterType::geared_pair) {
      jc["type"] = "geared_pair";
      jc["ratio"] = cl.ratio;
    } else {
      jc["type"] = "belt_two_link";
    }
    root["clusters"].push_back(jc);
  }
  return root.dump(2) + "\n";
}

MechanismModel MechanismModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ModelError("cannot open model file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

void MechanismModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ModelError("cannot write model file '" + path + "'");
  out << to_json_text();
}

SpanningTree MechanismModel::spanning_tree() const {
  MechanismModel tree;
  tree.set_name(name_ + "_spanning");
  tree.set_gravity(gravity_);
  for (const auto& b : bodies_) tree.add_body(b);
  tree.finalize();

  // v_tree = G v_min; every spanning joint is revolute for built-in clusters.
  MatX G = MatX::Zero(tree.nv(), nv_);
  int row = 0;
  for (int k = 0; k < num_clusters(); ++k) {
    const Cluster& cl = clusters_[k];
    switch (cl.type) {
      case ClusterType::single: {
        G.block(row, cl.v_offset, cl.nv, cl.nv).setIdentity();
        row += cl.nv;
        break;
      }
      case ClusterType::geared_pair: {
        G(row, cl.v_offset) = 1.0;
        G(row + 1, cl.v_offset) = cl.ratio;
        row += 2;
        break;
      }
      case ClusterType::belt_two_link: {
        G(row, cl.v_offset) = 1.0;
        G(row + 1, cl.v_offset) = -1.0;
        G(row + 1, cl.v_offset + 1) = 1.0;
        row += 2;
        break;
      }
      case ClusterType::custom:
        throw ModelError("spanning tree is not defined for custom clusters");
    }
  }
  return {std::move(tree), std::move(G)};
}

bool MechanismModel::numerically_equal(const MechanismModel& other) const {
  if (num_bodies() != other.num_bodies() || num_clusters() != other.num_clusters()) return false;
  if ((gravity_ - other.gravity_).cwiseAbs().maxCoeff() != 0.0) return false;
  for (int b = 0; b < num_bodies(); ++b) {
    const auto& a = bodies_[b];
    const auto& c = other.bodies_[b];
    if (a.name != c.name || a.parent != c.parent || a.joint.kind != c.joint.kind) return false;
    if ((a.theta - c.theta).cwiseAbs().maxCoeff() != 0.0) return false;
    if ((a.joint.axis - c.joint.axis).cwiseAbs().maxCoeff() != 0.0) return false;
    if (a.joint.pitch != c.joint.pitch) return false;
    if ((a.joint.offset_xyz - c.joint.offset_xyz).cwiseAbs().maxCoeff() != 0.0) return false;
    if ((a.joint.offset_rpy - c.joint.offset_rpy).cwiseAbs().maxCoeff() != 0.0) return false;
  }
  for (int k = 0; k < num_clusters(); ++k) {
    if (clusters_[k].type != other.clusters_[k].type) return false;
    if (clusters_[k].ratio != other.clusters_[k].ratio) return false;
  }
  return true;
}

}  // namespace corikit
