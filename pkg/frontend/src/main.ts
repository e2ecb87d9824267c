// Application bootstrap: wires the session controller to the DOM and walks
// through the stimulus list as tasks complete.

import { ListenerKind, SynthApi } from './api.js';
import { buildApp, hideFatal, refresh, showFatal } from './render.js';
import { SessionController } from './state.js';

export interface App {
  controller: SessionController;
  whenIdle: () => Promise<void>;
  root: HTMLElement;
}

export async function createApp(root: HTMLElement, baseUrl = '',
                                stimulusId = 0,
                                listener: ListenerKind = 'l1'): Promise<App> {
  const api = new SynthApi(baseUrl);
  let currentStimulus = stimulusId;
  let currentListener: ListenerKind = listener;
  let nStimuli = 1;

  const controller = new SessionController(api, {
    onChange: state => refresh(root, state),
    onFatal: message => showFatal(root, message),
  });

  const boot = async () => {
    hideFatal(root);
    try {
      const { stimuli } = await api.listStimuli();
      nStimuli = stimuli.length;
      await controller.start(currentListener, currentStimulus);
    } catch (err) {
      showFatal(root, err instanceof Error ? err.message : String(err));
      throw err;
    }
  };

  buildApp(root, {
    onCellClick: (x, y) => {
      const palette = root.querySelector('.palette')!;
      const symbol = Number(palette.getAttribute('data-selected') ?? '0');
      void controller.placeSymbol(x, y, symbol);
    },
    onUndo: () => void controller.undo(),
    onRobotSwitch: kind => {
      currentListener = kind;
      void controller.switchRobot(kind);
    },
    onNextTask: () => {
      currentStimulus = (currentStimulus + 1) % nStimuli;
      void controller.start(currentListener, currentStimulus);
    },
    onRetry: () => void boot().catch(() => undefined),
  });

  try {
    await boot();
  } catch {
    // fatal banner already shown; retry button re-attempts
  }
  return { controller, whenIdle: () => controller.whenIdle(), root };
}

declare global {
  interface Window {
    pragsynthApp?: Promise<App>;
  }
}

if (typeof window !== 'undefined' && typeof document !== 'undefined') {
  const mount = document.getElementById('app');
  if (mount) {
    window.pragsynthApp = createApp(mount);
  }
}
