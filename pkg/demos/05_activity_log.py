"""Activity log: classified run histograms, time spans, exact replay.

Every action is recorded with its container and, for runs, a
classification: linear (new cell at the end, everything above run in
order), lastCell (re-run of that end cell), or nonlinear (everything
else). The log aggregates into the usual instrumentation shapes and can
be replayed to reproduce the final document exactly.
"""

from scratchbook.activity import replay, report
from scratchbook.model import Notebook, START
from scratchbook.session import DocumentSession

session = DocumentSession(Notebook())
first = session.create_cell("main", START)
session.set_source(first, "a = 1")
session.run_cell(first)                       # linear
second = session.create_cell("main", first)
session.set_source(second, "b = a * 2\nb")
session.run_cell(second)                      # linear
session.run_cell(second)                      # lastCell
session.run_cell(first)                       # nonlinear: stales below
session.move_to_scratchpad(second)
session.run_cell(second)                      # lastCell of its new section
session.close()

print("recorded events:")
for event in session.log.events:
    mark = f" [{event.classification}]" if event.classification else ""
    print(f"  #{event.seq} {event.kind}{mark} ({event.container or '-'})")

summary = report(session.log)
print("\nrun counts by container and classification:")
for container, counts in summary.run_counts.items():
    print(f"  {container}: {counts}")
print(f"active spans: {len(summary.spans)}, time by container: {summary.time_by_container}")

# Replaying the log onto an empty document reproduces the final state.
replayed = replay(session.log.events)
print("\nreplay reproduces the document:", replayed.to_dict() == session.notebook.to_dict())
