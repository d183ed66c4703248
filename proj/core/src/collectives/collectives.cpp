// Copyright 2026 The ogrebench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ogre/collectives/collectives.hpp"

#include <algorithm>
#include <bit>
#include <set>

#include "ogre/compress.hpp"
#include "ogre/error.hpp"
#include "ogre/kernel/wire.hpp"

namespace ogre::collectives {

using fabric::Channel;

namespace {

constexpr std::uint64_t kPhaseReduce = 0;
constexpr std::uint64_t kPhaseBroadcast = 1;
constexpr std::uint64_t kPhasePre = 2;
constexpr std::uint64_t kPhasePost = 3;
constexpr std::uint64_t kPhaseRound = 4;  // + round index

}  // namespace

void CollectiveGroup::validate() const {
  if (members.empty()) fail(ErrorKind::invalid_argument, "collective group is empty");
  std::set<fabric::Endpoint> seen(members.begin(), members.end());
  if (seen.size() != members.size()) {
    fail(ErrorKind::invalid_argument, "collective group members must be distinct");
  }
}

std::uint64_t tree_allreduce_messages(std::uint64_t p) noexcept {
  return p == 0 ? 0 : 2 * (p - 1);
}

std::uint64_t recursive_doubling_messages(std::uint64_t p) noexcept {
  if (p <= 1) return 0;
  const std::uint64_t p2 = std::bit_floor(p);
  const std::uint64_t rounds = static_cast<std::uint64_t>(std::countr_zero(p2));
  return p2 * rounds + 2 * (p - p2);
}

Communicator::Communicator(fabric::Cluster& cluster, CollectiveGroup group,
                           std::size_t rank, Options options)
    : cluster_(cluster), group_(std::move(group)), rank_(rank), options_(options) {
  group_.validate();
  if (rank_ >= group_.members.size()) {
    fail(ErrorKind::invalid_argument, "rank outside the collective group");
  }
}

std::uint64_t Communicator::next_tag() noexcept {
  return (group_.epoch << 40) | ((++seq_ & 0xFFFFFFF) << 8);
}

void Communicator::send_bytes(std::size_t to, std::uint64_t tag, Bytes payload,
                              Channel ch) {
  cluster_.send(group_.members[rank_], group_.members[to], tag, ch, std::move(payload));
}

Bytes Communicator::recv_bytes(std::size_t from, std::uint64_t tag) {
  return cluster_.recv(group_.members[rank_], group_.members[from], tag).payload;
}

Bytes Communicator::encode_bundle(const Bundle& bundle) const {
  ByteWriter body;
  body.put_u32(static_cast<std::uint32_t>(bundle.size()));
  for (const auto& c : bundle) {
    body.put_u32(c.rank);
    kernel::encode(body, c.sums);
  }
  Bytes raw = std::move(body).take();
  ByteWriter framed(raw.size() + 1);
  if (options_.compress) {
    framed.put_u8(1);
    framed.put_bytes(ogre::compress(raw));
  } else {
    framed.put_u8(0);
    framed.put_bytes(raw);
  }
  return std::move(framed).take();
}

Communicator::Bundle Communicator::decode_bundle(std::span<const std::byte> framed) {
  if (framed.empty()) fail(ErrorKind::io, "empty collective payload");
  Bytes raw;
  auto body = framed.subspan(1);
  if (std::to_integer<int>(framed[0]) == 1) {
    raw = ogre::decompress(body);
    body = raw;
  }
  ByteReader r(body);
  Bundle bundle(r.get_u32());
  for (auto& c : bundle) {
    c.rank = r.get_u32();
    c.sums = kernel::decode_partial_sums(r);
  }
  if (r.remaining() != 0) fail(ErrorKind::io, "trailing bytes in collective payload");
  return bundle;
}

void Communicator::send_bundle(std::size_t to, std::uint64_t tag, const Bundle& bundle) {
  send_bytes(to, tag, encode_bundle(bundle), Channel::collective);
}

Communicator::Bundle Communicator::recv_bundle(std::size_t from, std::uint64_t tag) {
  return decode_bundle(recv_bytes(from, tag));
}

void Communicator::combine(Bundle& acc, Bundle incoming, bool incoming_is_lower) const {
  if (options_.deterministic) {
    for (auto& c : incoming) acc.push_back(std::move(c));
    return;
  }
  // Pairwise: fold the two partials, lower side on the left.
  auto& mine = acc.front().sums;
  auto& theirs = incoming.front().sums;
  if (incoming_is_lower) {
    kernel::merge_into(theirs, mine);
    mine = std::move(theirs);
    acc.front().rank = incoming.front().rank;
  } else {
    kernel::merge_into(mine, theirs);
  }
}

kernel::PartialSums Communicator::fold(Bundle bundle) {
  std::sort(bundle.begin(), bundle.end(),
            [](const Contribution& a, const Contribution& b) { return a.rank < b.rank; });
  kernel::PartialSums acc = std::move(bundle.front().sums);
  for (std::size_t i = 1; i < bundle.size(); ++i) kernel::merge_into(acc, bundle[i].sums);
  return acc;
}

std::optional<Communicator::Bundle> Communicator::tree_reduce(std::size_t root, Bundle acc,
                                                              std::uint64_t tag) {
  const std::size_t p = size();
  const std::size_t vr = (rank_ + p - root) % p;
  for (std::size_t mask = 1; mask < p; mask <<= 1) {
    if (vr & mask) {
      send_bundle((vr - mask + root) % p, tag, acc);
      return std::nullopt;
    }
    const std::size_t child = vr + mask;
    if (child < p) combine(acc, recv_bundle((child + root) % p, tag), false);
  }
  return acc;
}

Bytes Communicator::tree_broadcast(std::size_t root, Bytes payload, std::uint64_t tag,
                                   Channel ch) {
  const std::size_t p = size();
  const std::size_t vr = (rank_ + p - root) % p;
  std::size_t top = std::bit_ceil(p);
  if (vr != 0) {
    const std::size_t low = vr & (~vr + 1);
    payload = recv_bytes((vr - low + root) % p, tag);
    top = low;
  }
  for (std::size_t mask = top >> 1; mask > 0; mask >>= 1) {
    const std::size_t child = vr + mask;
    if (child < p) send_bytes((child + root) % p, tag, payload, ch);
  }
  return payload;
}

std::optional<kernel::PartialSums> Communicator::reduce(std::size_t root,
                                                        const kernel::PartialSums& local) {
  if (root >= size()) fail(ErrorKind::invalid_argument, "reduce root outside the group");
  const auto tag = next_tag();
  auto result = tree_reduce(root, Bundle{{static_cast<std::uint32_t>(rank_), local}},
                            tag | kPhaseReduce);
  if (!result) return std::nullopt;
  return fold(std::move(*result));
}

Bytes Communicator::broadcast(std::size_t root, Bytes payload) {
  if (root >= size()) fail(ErrorKind::invalid_argument, "broadcast root outside the group");
  const auto tag = next_tag();
  return tree_broadcast(root, std::move(payload), tag | kPhaseBroadcast, Channel::collective);
}

kernel::PartialSums Communicator::allreduce(const kernel::PartialSums& local,
                                            std::size_t root) {
  if (root >= size()) fail(ErrorKind::invalid_argument, "allreduce root outside the group");
  if (size() == 1) return local;
  return options_.algorithm == Algorithm::tree ? allreduce_tree(local, root)
                                               : allreduce_recursive_doubling(local);
}

kernel::PartialSums Communicator::allreduce_tree(const kernel::PartialSums& local,
                                                 std::size_t root) {
  const auto tag = next_tag();
  auto gathered = tree_reduce(root, Bundle{{static_cast<std::uint32_t>(rank_), local}},
                              tag | kPhaseReduce);
  Bytes folded;
  if (gathered) {
    folded = encode_bundle(
        Bundle{{static_cast<std::uint32_t>(root), fold(std::move(*gathered))}});
  }
  folded = tree_broadcast(root, std::move(folded), tag | kPhaseBroadcast, Channel::collective);
  return fold(decode_bundle(folded));
}

kernel::PartialSums Communicator::allreduce_recursive_doubling(
    const kernel::PartialSums& local) {
  const std::size_t p = size();
  const std::size_t p2 = std::bit_floor(p);
  const std::size_t extra = p - p2;
  const auto tag = next_tag();
  Bundle acc{{static_cast<std::uint32_t>(rank_), local}};

  if (rank_ >= p2) {
    send_bundle(rank_ - p2, tag | kPhasePre, acc);
    return fold(recv_bundle(rank_ - p2, tag | kPhasePost));
  }
  if (rank_ < extra) combine(acc, recv_bundle(rank_ + p2, tag | kPhasePre), false);

  std::uint64_t round = 0;
  for (std::size_t mask = 1; mask < p2; mask <<= 1, ++round) {
    const std::size_t partner = rank_ ^ mask;
    const auto round_tag = tag | (kPhaseRound + round);
    send_bundle(partner, round_tag, acc);
    combine(acc, recv_bundle(partner, round_tag), partner < rank_);
  }

  auto result = fold(std::move(acc));
  if (rank_ < extra) {
    send_bundle(rank_ + p2, tag | kPhasePost,
                Bundle{{static_cast<std::uint32_t>(rank_), result}});
  }
  return result;
}

void Communicator::barrier() {
  const std::size_t p = size();
  if (p == 1) return;
  const auto tag = next_tag() | kPhaseReduce;
  if (rank_ == 0) {
    for (std::size_t r = 1; r < p; ++r) recv_bytes(r, tag);
    for (std::size_t r = 1; r < p; ++r) send_bytes(r, tag | kPhaseBroadcast, {}, Channel::control);
  } else {
    send_bytes(0, tag, {}, Channel::control);
    recv_bytes(0, tag | kPhaseBroadcast);
  }
}

}  // namespace ogre::collectives
