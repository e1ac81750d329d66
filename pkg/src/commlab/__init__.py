"""commlab: a deterministic desk-scale lab for the communication graphs of
synchronous message-passing protocols.

The package has four layers:

* ``commlab.graphs`` -- undirected graph snapshots, exact edge-expansion,
  ordered cut enumeration and low-weight vertex partitions.
* ``commlab.ecss`` / ``commlab.itsig`` / ``commlab.election`` / ``commlab.pki``
  -- information-theoretic primitives (robust secret sharing, polynomial
  signatures with private per-verifier keys, lightest-bin election, key setup).
* ``commlab.netsim`` -- a deterministic synchronous round engine with
  per-message adversary hooks and trace recording.
* ``commlab.protocols`` / ``commlab.adversary`` / ``commlab.harness`` --
  protocol implementations, attack strategies and the experiment runner.
"""

__version__ = "0.1.0"
