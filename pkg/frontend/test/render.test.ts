import { describe, expect, it } from 'vitest'

import { ViewState } from '../src/controller.js'
import {
  renderBanner, renderEnabled, renderHistory, renderReplayControls,
  renderStateTables,
} from '../src/render.js'
import { parseTrace, prefixTrace, transitionLabel } from '../src/types.js'

function view(overrides: Partial<ViewState> = {}): ViewState {
  return {
    session: 's1',
    connected: true,
    busy: false,
    error: null,
    digest: 'abcd1234abcd1234',
    step: 3,
    variables: [{ name: 'loc', value: '["Out","Out"]' }],
    timers: [{ name: 'env.t', value: 2, mono: false }],
    clocks: [{ label: 'move_out(T1)', value: 2, urgent: true }],
    pendingEvent: null,
    lastTransition: 'tick',
    enabled: [
      { label: 'arrive(T1)#', urgent: false, successors: 1, clickable: true },
      { label: 'tick', urgent: false, successors: 1, clickable: true },
    ],
    history: [{ label: 'tick', digest: 'ffff0000ffff0000', inCycle: true }],
    replay: null,
    ...overrides,
  }
}

describe('state tables', () => {
  it('shows variables, stopped timers, urgent clocks, digest', () => {
    const html = renderStateTables(view())
    expect(html).toContain('loc')
    expect(html).toContain('stopped')
    expect(html).toContain('URGENT')
    expect(html).toContain('abcd1234abcd1234')
    expect(html).toContain('last: tick')
  })

  it('escapes html in values', () => {
    const html = renderStateTables(view({
      variables: [{ name: 'x', value: '<script>' }],
    }))
    expect(html).not.toContain('<script>')
    expect(html).toContain('&lt;script&gt;')
  })
})

describe('enabled list', () => {
  it('renders one button per transition', () => {
    const html = renderEnabled(view())
    expect(html.match(/<button/g)?.length).toBe(2)
  })

  it('marks urgent transitions', () => {
    const html = renderEnabled(view({
      enabled: [{ label: 'e#', urgent: true, successors: 1, clickable: true }],
    }))
    expect(html).toContain('badge')
    expect(html).toContain('urgent')
  })

  it('disables buttons while busy', () => {
    const html = renderEnabled(view({
      enabled: [{ label: 'e#', urgent: false, successors: 1, clickable: false }],
    }))
    expect(html).toContain('disabled')
  })
})

describe('history and replay', () => {
  it('marks cycle rows', () => {
    expect(renderHistory(view())).toContain('class="cycle"')
  })

  it('replay controls appear only in replay mode', () => {
    expect(renderReplayControls(view())).toBe('')
    const html = renderReplayControls(view({
      replay: { position: 4, total: 9, cycleStart: 4 },
    }))
    expect(html).toContain('4/9')
    expect(html).toContain('jump to cycle')
  })
})

describe('banner', () => {
  it('connection loss banner offers retry', () => {
    const html = renderBanner(view({ connected: false }))
    expect(html).toContain('retry')
  })

  it('error message surfaces', () => {
    expect(renderBanner(view({ error: 'ModelMismatch: nope' })))
      .toContain('ModelMismatch')
  })
})

describe('trace parsing', () => {
  const text = [
    '{"kind":"header","model":"aaaa"}',
    '{"kind":"step","transition":{"kind":"tick"},"choice":[],"digest":"d1"}',
    '{"kind":"cycle"}',
    '{"kind":"step","transition":{"kind":"event","event":"e","fair":["T1"],"demonic":[2]},"choice":[],"digest":"d2"}',
  ].join('\n') + '\n'

  it('splits header, steps, cycle marker', () => {
    const parsed = parseTrace(text)
    expect(parsed.steps.length).toBe(2)
    expect(parsed.cycleStart).toBe(1)
  })

  it('prefixTrace drops the marker and truncates verbatim', () => {
    const parsed = parseTrace(text)
    expect(prefixTrace(parsed, 1)).toBe(
      '{"kind":"header","model":"aaaa"}\n' +
      '{"kind":"step","transition":{"kind":"tick"},"choice":[],"digest":"d1"}\n',
    )
  })

  it('transition labels match the service rendering', () => {
    const parsed = parseTrace(text)
    expect(transitionLabel(parsed.steps[0].transition)).toBe('tick')
    expect(transitionLabel(parsed.steps[1].transition)).toBe('e(T1; 2)')
  })
})
