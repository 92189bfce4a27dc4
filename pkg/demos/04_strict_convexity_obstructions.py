"""Which graphs can sit isometrically inside a strictly convex space?

In a strictly convex normed space midpoints are unique, so an isometric
copy of a graph cannot contain a vertex that must be the midpoint of two
different segments, nor a chordless cycle of length four or more.  That
forces every isometrically embeddable connected graph to be a path or a
complete graph; the classifier decides which and produces the obstruction
otherwise.
"""

from netembed import classify, embeddability_verdict, from_edges


def complete(n):
    return from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def path(n):
    return from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle(n):
    return from_edges(n, [(i, (i + 1) % n) for i in range(n)])


petersen = from_edges(10, [(i, (i + 1) % 5) for i in range(5)]
                      + [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
                      + [(i, 5 + i) for i in range(5)])
zoo = [
    ("K1", from_edges(1, [])),
    ("K2", from_edges(2, [(0, 1)])),
    ("P5", path(5)),
    ("P10", path(10)),
    ("C3 = K3", cycle(3)),
    ("C4", cycle(4)),
    ("C5", cycle(5)),
    ("K4", complete(4)),
    ("K7", complete(7)),
    ("claw K1,3", from_edges(4, [(0, 1), (0, 2), (0, 3)])),
    ("paw", from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)])),
    ("Petersen", petersen),
]

print(f"{'graph':<12} {'verdict':<10} {'embeddable?':<20} certificate")
print("-" * 76)
for name, g in zoo:
    c = classify(g)
    cert = ""
    if c.certificate is not None:
        if c.certificate["kind"] == "cycle":
            cert = f"chordless cycle {c.certificate['vertices']}"
        else:
            v = c.certificate["vertex"]
            a, b = c.certificate["pair"]
            cert = f"vertex {v} with nonadjacent neighbors {a},{b}"
    flag = " (doubly so)" if c.both else ""
    print(f"{name:<12} {c.verdict + flag:<10} "
          f"{embeddability_verdict(g):<20} {cert}")
