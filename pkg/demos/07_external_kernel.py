"""The external kernel: real Python in a sandboxed child process.

The engine talks to a spawned interpreter over newline-delimited JSON
frames. Linear semantics and section sandboxing work identically to the
built-in calculator kernel; the sanitizer strips display calls from
replayed prefixes so side effects are not repeated.
"""

from scratchbook import Executor, Notebook, START
from scratchbook.kernels import PYTHON_SANITIZER, ExternalSession

nb = Notebook(kernel_spec="python")
ex = Executor(nb, ExternalSession, PYTHON_SANITIZER)

load = nb.create_cell("main", START, source="words = ['tidy', 'note', 'book']\nprint(len(words))")
join = nb.create_cell("main", load, source="title = '-'.join(words)\ntitle")

for cell_id in (load, join):
    result = ex.run_cell(cell_id)
    print(f"{nb.get_cell(cell_id).source.splitlines()[0]!r}")
    for output in result.outputs:
        print(f"   [{output.channel}] {output.text.strip()}")

# The prefix replay is silent: re-running the second cell does not repeat
# the first cell's print, yet still sees its variables.
result = ex.run_cell(join)
print(f"\nrerun of the last cell ({result.classification}) printed nothing extra:")
for output in result.outputs:
    print(f"   [{output.channel}] {output.text.strip()}")

# Scratch sections fork real Python state too.
probe = nb.create_cell("main", join, source="words.append('scratch')\nlen(words)")
nb.move_to_scratchpad(probe)
print(f"\nscratch append sees {ex.run_cell(probe).outputs[-1].text} entries")
check = nb.create_cell("main", join, source="len(words)")
print(f"main still sees {ex.run_cell(check).outputs[-1].text}")

ex.close()
